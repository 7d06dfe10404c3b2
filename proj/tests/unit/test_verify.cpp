#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace tegeo;

namespace {

const Verdict& verdict(const Report& r, const std::string& id) {
  for (const auto& v : r.verdicts) {
    if (v.id == id) return v;
  }
  throw std::logic_error("no verdict " + id);
}

bool has_verdict(const Report& r, const std::string& id) {
  return std::any_of(r.verdicts.begin(), r.verdicts.end(), [&](const Verdict& v) { return v.id == id; });
}

const CheckRecord& check(const Report& r, const std::string& section, const std::string& name) {
  for (const auto& s : r.sections) {
    if (s.name != section) continue;
    for (const auto& c : s.checks) {
      if (c.name == name) return c;
    }
  }
  throw std::logic_error("no check " + section + "/" + name);
}

bool all_members(const Verdict& v, bool holds) {
  return std::all_of(v.members.begin(), v.members.end(), [&](const VerdictMember& m) { return m.holds == holds; });
}

Report run_gallery(const std::string& name) {
  const ModelConfig c = gallery_config(name);
  return verify(build_model(c), c.sampling, c.tolerances);
}

SampleSpec small_spec(int points, std::uint64_t seed) {
  SampleSpec s;
  s.points = points;
  s.seed = seed;
  return s;
}

Model scaled(const Model& m, double c) {
  const int n = m.metric.dim();
  std::vector<Expression> g;
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) g.push_back(Expression(c, n) * m.metric.component(l, k));
  }
  MetricField metric(n, g, m.metric.unit_power());
  ConnectionField conn = m.connection;
  if (conn.is_linear() && conn.linear().levi_civita_metric()) conn = levi_civita(metric);
  return {m.chart, metric, conn};
}

}  // namespace

TEST(Verify, GalleryOutcomes) {
  const std::vector<std::pair<std::string, int>> expected{
      {"minkowski-metric", 0}, {"minkowski-zero-K", 0}, {"schwarzschild", 0},     {"nonmetric-linear", 1},
      {"symmetric-nabla", 0},  {"nonlinear-general", 1}, {"dim5-flat", 0}};
  for (const auto& [name, code] : expected) {
    const Report r = run_gallery(name);
    EXPECT_EQ(r.exit_code(), code) << name;
    EXPECT_TRUE(r.all_consistent()) << name;
    EXPECT_TRUE(r.valid) << name;
  }
}

TEST(Verify, SymmetricNablaSatisfiesTheTorsionFreeEquivalence) {
  const Report r = run_gallery("symmetric-nabla");
  ASSERT_TRUE(has_verdict(r, "torsion-free-equivalence"));
  EXPECT_TRUE(all_members(verdict(r, "torsion-free-equivalence"), true));
  EXPECT_TRUE(all_members(verdict(r, "symplectic-poisson"), true));
  EXPECT_TRUE(all_members(verdict(r, "linear-equivalence"), true));
  // The connection is not metric: nabla g itself is far from zero.
  const Model m = support::model_of("symmetric-nabla");
  EXPECT_GT(covariant_derivative_g(m.metric, m.connection, {0.1, 0.2, 0.3, 0.4}).max_abs(), 0.1);
}

TEST(Verify, NonmetricLinearFailsEveryMember) {
  const Report r = run_gallery("nonmetric-linear");
  EXPECT_TRUE(all_members(verdict(r, "symplectic-poisson"), false));
  EXPECT_TRUE(all_members(verdict(r, "linear-equivalence"), false));
  EXPECT_FALSE(has_verdict(r, "torsion-free-equivalence"));
  EXPECT_NEAR(check(r, "symplectic", "d-upsilon").value, 1.0, 1e-12);
}

TEST(Verify, DeterministicForAFixedSeed) {
  const Model m = support::model_of("schwarzschild");
  SampleSpec s = support::schwarzschild_box(20, 7);
  const std::string a = report_machine(verify(m, s, {}), "h");
  const std::string b = report_machine(verify(m, s, {}), "h");
  EXPECT_EQ(a, b);
  s.seed = 8;
  EXPECT_NE(a, report_machine(verify(m, s, {}), "h"));
}

TEST(Verify, SamplingSequenceIsPinned) {
  std::mt19937_64 rng(42);
  EXPECT_EQ(rng(), 13930160852258120406ull);
  std::mt19937_64 again(42);
  const double u = uniform(again, -1.0, 1.0);
  EXPECT_DOUBLE_EQ(u, -1.0 + 2.0 * static_cast<double>(13930160852258120406ull >> 11) * 0x1.0p-53);
}

TEST(Verify, SkippedPointsAreRecordedNotResampled) {
  const Model m = support::model_of("schwarzschild");
  SampleSpec s = support::schwarzschild_box(40, 3);
  s.base_box[1] = {1.0, 3.0};  // mostly inside the excluded region r <= 2.2
  const Report r = verify(m, s, {});
  EXPECT_GT(r.skipped.size(), 4u);
  EXPECT_EQ(r.points_evaluated + static_cast<int>(r.skipped.size()), 40);
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(r.exit_code(), 1);
  for (const auto& sk : r.skipped) {
    EXPECT_FALSE(sk.reason.empty());
    EXPECT_LE(sk.point.x[1], 2.2 + 1e-12);
  }
}

TEST(Verify, FewSkipsKeepTheReportValid) {
  const Model m = support::model_of("schwarzschild");
  SampleSpec s = support::schwarzschild_box(200, 5);
  s.base_box[1] = {2.12, 15.0};  // about 1% of the radii fall below the guard
  const Report r = verify(m, s, {});
  EXPECT_GT(r.skipped.size(), 0u);
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Verify, LinearFamilyVerdicts) {
  std::mt19937_64 rng(71);
  const MetricField g = support::stretched();
  for (int trial = 0; trial < 3; ++trial) {
    for (auto family : {LinearFamily::Generic, LinearFamily::Compatible, LinearFamily::TorsionFree,
                        LinearFamily::SymmetricNabla}) {
      const Model m{Chart(4), g, random_linear_connection(rng, g, family)};
      const Report r = verify(m, small_spec(10, rng()), {});
      EXPECT_TRUE(r.all_consistent());
      const bool linear_holds = family == LinearFamily::Compatible || family == LinearFamily::SymmetricNabla;
      EXPECT_TRUE(all_members(verdict(r, "linear-equivalence"), linear_holds));
      EXPECT_TRUE(all_members(verdict(r, "symplectic-poisson"), linear_holds));
      const bool torsion_free = family == LinearFamily::TorsionFree || family == LinearFamily::SymmetricNabla;
      ASSERT_EQ(has_verdict(r, "torsion-free-equivalence"), torsion_free);
      if (torsion_free) {
        EXPECT_TRUE(all_members(verdict(r, "torsion-free-equivalence"), family == LinearFamily::SymmetricNabla));
      }
    }
  }
}

TEST(Verify, TorsionFreeSuiteRejectsTorsion) {
  const Model m = support::model_of("nonmetric-linear");
  const Sampling s = sample(m, small_spec(5, 1));
  try {
    check_torsion_free_equivalence(m, s, {});
    FAIL() << "expected an error";
  } catch (const VerificationError& e) {
    EXPECT_EQ(e.kind(), VerificationError::Kind::HasTorsion);
  }
}

TEST(Verify, LinearSuiteRejectsGeneralConnections) {
  const Model m = support::model_of("nonlinear-general");
  const Sampling s = sample(m, small_spec(5, 1));
  EXPECT_THROW(check_linear_equivalence(m, s, {}), FieldError);
  EXPECT_FALSE(has_verdict(verify(m, small_spec(5, 1), {}), "linear-equivalence"));
}

TEST(Verify, ResidualsScaleWithTheUnitPower) {
  const Model base = support::model_of("nonmetric-linear");
  const SampleSpec s = small_spec(10, 9);
  const Report r1 = verify(base, s, {});
  for (double c : {1e-2, 1e2}) {
    const Report rc = verify(scaled(base, c), s, {});
    EXPECT_NEAR(check(rc, "symplectic", "d-upsilon").value, c * check(r1, "symplectic", "d-upsilon").value,
                1e-12 * c);
    EXPECT_NEAR(check(rc, "poisson", "schouten").value, check(r1, "poisson", "schouten").value / (c * c),
                1e-10 / (c * c));
    EXPECT_NEAR(check(rc, "symplectic", "upsilon-nondegeneracy").value,
                check(r1, "symplectic", "upsilon-nondegeneracy").value, 1e-12);
    for (std::size_t i = 0; i < r1.verdicts.size(); ++i) {
      for (std::size_t k = 0; k < r1.verdicts[i].members.size(); ++k) {
        EXPECT_EQ(rc.verdicts[i].members[k].holds, r1.verdicts[i].members[k].holds);
      }
    }
  }
  for (double c : {1e-2, 1e2}) {
    const Report rc = verify(scaled(support::model_of("schwarzschild"), c), support::schwarzschild_box(10, 4), {});
    EXPECT_EQ(rc.exit_code(), 0) << c;
  }
}

TEST(Verify, SymplecticAndPoissonAgreeOnRandomConnections) {
  std::mt19937_64 rng(73);
  const MetricField g = support::minkowski();
  int both_hold = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ConnectionField k = support::zero_linear(4);
    switch (trial % 5) {
      case 0: k = random_linear_connection(rng, g, LinearFamily::Generic); break;
      case 1: k = random_linear_connection(rng, g, LinearFamily::Compatible); break;
      case 2: k = random_linear_connection(rng, g, LinearFamily::SymmetricNabla); break;
      case 3: k = support::quadratic_velocity(uniform(rng, -1, 1)); break;
      default: {
        // Metric-compatible linear part written out in the velocities, plus
        // a velocity-quadratic term on half of the trials. The Levi-Civita
        // part of the flat metric vanishes in these coordinates.
        const LinearConnection lin = random_linear_connection(rng, g, LinearFamily::Compatible);
        std::vector<Expression> c;
        for (int l = 0; l < 4; ++l) {
          for (int nu = 0; nu < 4; ++nu) {
            Expression e = trial % 2 ? Expression(0.0, 4)
                                     : Expression(uniform(rng, -1, 1), 4) * Expression::velocity(l, 4) *
                                           Expression::velocity(nu, 4);
            for (int r = 0; r < 4; ++r) e = e + lin.coefficient(l, nu, r) * Expression::velocity(r, 4);
            c.push_back(e);
          }
        }
        k = GeneralConnection(4, c);
      }
    }
    const Model m{Chart(4), g, k};
    const Report r = verify(m, small_spec(8, rng()), {});
    const Verdict& v = verdict(r, "symplectic-poisson");
    EXPECT_TRUE(v.consistent) << trial;
    both_hold += v.members[0].holds;
  }
  EXPECT_GT(both_hold, 0);
  EXPECT_LT(both_hold, 50);
}

TEST(Verify, FuzzedModelsNeverReportInconsistency) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 30; ++trial) {
    // Random diagonal metric with positive spatial factors.
    std::vector<Expression> diag{Expression(-1.0, 4)};
    for (int i = 1; i < 4; ++i) {
      const std::string arg = std::to_string(uniform(rng, -1, 1)) + "*x0 + " + std::to_string(uniform(rng, -1, 1)) +
                              "*x" + std::to_string(i) + "^2";
      diag.push_back(parse("1.5 + 0.5*sin(" + arg + ")", 4));
    }
    std::vector<Expression> comps;
    for (int l = 0; l < 4; ++l) {
      for (int m = 0; m < 4; ++m) comps.push_back(l == m ? diag[l] : Expression(0.0, 4));
    }
    const MetricField g(4, comps);
    const LinearFamily families[] = {LinearFamily::Generic, LinearFamily::Compatible, LinearFamily::TorsionFree,
                                     LinearFamily::SymmetricNabla};
    const ConnectionField k = trial % 5 == 4 ? ConnectionField(levi_civita(g))
                                             : ConnectionField(random_linear_connection(rng, g, families[trial % 4]));
    const Report r = verify({Chart(4), g, k}, small_spec(6, rng()), {});
    EXPECT_NE(r.exit_code(), 3) << trial;
  }
}

TEST(Verify, FdOracleAgreesOnGallery) {
  for (const auto& name : gallery_names()) {
    const Report r = run_gallery(name);
    EXPECT_GE(check(r, "fd-oracle", "fd-fraction-within").value, 0.95) << name;
  }
}
