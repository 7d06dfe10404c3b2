#pragma once

// Sampling, condition suites, theorem-equivalence verdicts and the
// finite-difference oracle over a (metric, connection) pair.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tegeo/generators.hpp"
#include "tegeo/geometry.hpp"

namespace tegeo {

struct Model {
  Chart chart;
  MetricField metric;
  ConnectionField connection;
};

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct SampleSpec {
  int points = 30;
  std::vector<Interval> base_box;      // one interval per coordinate; empty means [-1, 1]
  std::vector<Interval> velocity_box;  // one interval per coordinate; empty means [-2, 2]
  std::uint64_t seed = 42;
};

struct Tolerances {
  double residual = 1e-8;
  double nondegeneracy = 1e-10;
  double fd_step = 1e-5;
  double fd_relative = 1e-5;
  double fd_pass_fraction = 0.95;
  double max_skip_fraction = 0.10;
};

struct SkippedPoint {
  int index = 0;
  TangentPoint point;
  std::string reason;
};

struct SampledPoint {
  int index = 0;
  TangentPoint point;
};

struct Sampling {
  int requested = 0;
  std::vector<SampledPoint> points;
  std::vector<SkippedPoint> skipped;
};

class VerificationError : public std::runtime_error {
 public:
  enum class Kind { InvalidSpec, NotLinear, HasTorsion };
  VerificationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Draws spec.points points uniformly from the boxes. Points rejected by
/// the chart guards or where the metric cannot be evaluated are skipped
/// and recorded, never resampled.
inline Sampling sample(const Model& model, const SampleSpec& spec) {
  const int n = model.chart.dim();
  if (spec.points < 1) throw VerificationError(VerificationError::Kind::InvalidSpec, "point count must be >= 1");
  auto box = [&](const std::vector<Interval>& b, double half) {
    if (b.empty()) return std::vector<Interval>(static_cast<std::size_t>(n), Interval{-half, half});
    if (static_cast<int>(b.size()) != n) {
      throw VerificationError(VerificationError::Kind::InvalidSpec, "sampling box needs one interval per coordinate");
    }
    for (const auto& i : b) {
      if (!(i.lo <= i.hi)) throw VerificationError(VerificationError::Kind::InvalidSpec, "empty sampling interval");
    }
    return b;
  };
  const auto base = box(spec.base_box, 1.0);
  const auto vel = box(spec.velocity_box, 2.0);

  std::mt19937_64 rng(spec.seed);
  Sampling out;
  out.requested = spec.points;
  for (int i = 0; i < spec.points; ++i) {
    TangentPoint p;
    for (int a = 0; a < n; ++a) p.x.push_back(uniform(rng, base[a].lo, base[a].hi));
    for (int a = 0; a < n; ++a) p.xdot.push_back(uniform(rng, vel[a].lo, vel[a].hi));
    std::optional<std::string> why = model.chart.rejection(p);
    if (!why) {
      try {
        (void)eval_metric(model.metric, p);
      } catch (const FieldError& e) {
        why = e.what();
      } catch (const DomainError& e) {
        why = e.what();
      }
    }
    if (why) {
      out.skipped.push_back({i, p, *why});
    } else {
      out.points.push_back({i, p});
    }
  }
  return out;
}

enum class Comparison { Below, Above };

/// One numeric check: `value` is a max-norm residual that passes when
/// strictly below `tolerance` (Below), or a minimum over sample points that
/// passes when at least `tolerance` (Above).
struct CheckRecord {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::Below;
  bool pass = true;
  int unit_power = 0;
  std::optional<TangentPoint> worst_point;
};

struct Section {
  std::string name;
  std::vector<CheckRecord> checks;
  bool pass = true;
  int skipped = 0;
};

struct VerdictMember {
  std::string name;
  bool holds = false;
};

struct Verdict {
  std::string id;
  std::vector<VerdictMember> members;
  bool consistent = true;
};

namespace detail {

/// Running max (or min) of a per-point quantity with its worst point.
class Extremum {
 public:
  explicit Extremum(Comparison c) : comparison_(c), value_(c == Comparison::Below ? 0.0 : INFINITY) {}

  void add(double v, const TangentPoint& p) {
    const bool worse = comparison_ == Comparison::Below ? (v > value_ || std::isnan(v)) : v < value_;
    if (worse || !worst_) {
      value_ = v;
      worst_ = p;
    }
  }

  CheckRecord record(std::string name, double tolerance, int unit_power) const {
    CheckRecord r;
    r.name = std::move(name);
    r.value = std::isinf(value_) ? 0.0 : value_;
    r.tolerance = tolerance;
    r.comparison = comparison_;
    r.pass = comparison_ == Comparison::Below ? value_ < tolerance : value_ >= tolerance;
    r.unit_power = unit_power;
    r.worst_point = worst_;
    return r;
  }

 private:
  Comparison comparison_;
  double value_;
  std::optional<TangentPoint> worst_;
};

/// Reciprocal condition number of a square matrix, from its singular values.
inline double reciprocal_condition(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

inline Section finish(Section s) {
  s.pass = std::all_of(s.checks.begin(), s.checks.end(), [](const CheckRecord& c) { return c.pass; });
  return s;
}

inline bool check_pass(const Section& s, const std::string& name) {
  for (const auto& c : s.checks) {
    if (c.name == name) return c.pass;
  }
  throw std::logic_error("no check named " + name);
}

inline Verdict make_verdict(std::string id, std::vector<VerdictMember> members) {
  Verdict v{std::move(id), std::move(members), true};
  for (const auto& m : v.members) v.consistent = v.consistent && m.holds == v.members.front().holds;
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Suites

/// Closedness of the 2-form and its nondegeneracy (reciprocal condition
/// number of the 2n x 2n coefficient matrix).
inline Section check_symplectic(const Model& m, const Sampling& s, const Tolerances& tol) {
  detail::Extremum closed(Comparison::Below), nondeg(Comparison::Above);
  for (const auto& sp : s.points) {
    const PointData pd = sample_point(m.metric, m.connection, sp.point);
    closed.add(two_form_differential(pd).max_abs(), sp.point);
    nondeg.add(detail::reciprocal_condition(spacetime_two_form(pd).as_matrix<Eigen::MatrixXd>()), sp.point);
  }
  const int p = m.metric.unit_power();
  return detail::finish({"symplectic",
                         {closed.record("d-upsilon", tol.residual, p),
                          nondeg.record("upsilon-nondegeneracy", tol.nondegeneracy, 0)}});
}

/// Vanishing of the Schouten bracket of the 2-vector and its nondegeneracy.
inline Section check_poisson(const Model& m, const Sampling& s, const Tolerances& tol) {
  detail::Extremum jacobi(Comparison::Below), nondeg(Comparison::Above);
  for (const auto& sp : s.points) {
    const PointData pd = sample_point(m.metric, m.connection, sp.point);
    jacobi.add(schouten_bracket(pd).max_abs(), sp.point);
    nondeg.add(detail::reciprocal_condition(spacetime_two_vector(pd).as_matrix<Eigen::MatrixXd>()), sp.point);
  }
  const int p = m.metric.unit_power();
  return detail::finish({"poisson",
                         {jacobi.record("schouten", tol.residual, -2 * p),
                          nondeg.record("lambda-nondegeneracy", tol.nondegeneracy, 0)}});
}

/// Coordinate conditions for a general connection: vertical compatibility,
/// cyclic curvature, the Liouville Lie derivative and their raised forms.
inline Section check_conditions(const Model& m, const Sampling& s, const Tolerances& tol) {
  detail::Extremum compat(Comparison::Below), cyclic(Comparison::Below), liouville(Comparison::Below),
      raised_compat(Comparison::Below), raised_cyclic(Comparison::Below);
  for (const auto& sp : s.points) {
    const PointData pd = sample_point(m.metric, m.connection, sp.point);
    compat.add(vertical_compatibility_residual(pd).max_abs(), sp.point);
    cyclic.add(cyclic_curvature_residual(pd).max_abs(), sp.point);
    liouville.add(liouville_lie_derivative_gflat(pd).max_abs(), sp.point);
    raised_compat.add(raised_compatibility_residual(pd).max_abs(), sp.point);
    raised_cyclic.add(raised_cyclic_curvature_residual(pd).max_abs(), sp.point);
  }
  const int p = m.metric.unit_power();
  return detail::finish({"conditions",
                         {compat.record("vertical-compatibility", tol.residual, p),
                          cyclic.record("cyclic-curvature", tol.residual, p),
                          liouville.record("liouville-lie-gflat", tol.residual, p),
                          raised_compat.record("raised-compatibility", tol.residual, -2 * p),
                          raised_cyclic.record("raised-cyclic-curvature", tol.residual, -2 * p)}});
}

/// Two-sided agreement of the symplectic closedness, the Jacobi identity
/// and the two pairs of coordinate conditions.
inline Verdict verdict_symplectic_poisson(const Section& symplectic, const Section& poisson,
                                          const Section& conditions) {
  using detail::check_pass;
  return detail::make_verdict(
      "symplectic-poisson",
      {{"d-upsilon=0", check_pass(symplectic, "d-upsilon")},
       {"schouten=0", check_pass(poisson, "schouten")},
       {"compatibility+cyclic-curvature",
        check_pass(conditions, "vertical-compatibility") && check_pass(conditions, "cyclic-curvature")},
       {"raised-compatibility+raised-cyclic-curvature",
        check_pass(conditions, "raised-compatibility") && check_pass(conditions, "raised-cyclic-curvature")}});
}

struct SuiteResult {
  Section section;
  Verdict verdict;
};

/// Equivalence for a linear connection of L[K] g-flat = 0, d_K g = 0,
/// closedness of the 2-form and the Jacobi identity.
inline SuiteResult check_linear_equivalence(const Model& m, const Sampling& s, const Tolerances& tol) {
  const LinearConnection& lin = m.connection.linear();
  detail::Extremum lie(Comparison::Below), dk(Comparison::Below), closed(Comparison::Below),
      jacobi(Comparison::Below);
  for (const auto& sp : s.points) {
    const PointData pd = sample_point(m.metric, m.connection, sp.point);
    lie.add(lie_derivative_gflat(pd).max_abs(), sp.point);
    const TangentPoint base{sp.point.x, std::vector<double>(sp.point.x.size(), 0.0)};
    dk.add(covariant_differential_g(eval_metric(m.metric, base), eval_linear(lin, sp.point.x)).max_abs(),
           sp.point);
    closed.add(two_form_differential(pd).max_abs(), sp.point);
    jacobi.add(schouten_bracket(pd).max_abs(), sp.point);
  }
  const int p = m.metric.unit_power();
  Section sec = detail::finish({"linear-equivalence",
                                {lie.record("lie-K-gflat", tol.residual, p),
                                 dk.record("d-K-g", tol.residual, p),
                                 closed.record("d-upsilon", tol.residual, p),
                                 jacobi.record("schouten", tol.residual, -2 * p)}});
  Verdict v = detail::make_verdict("linear-equivalence", {{"lie-K-gflat=0", sec.checks[0].pass},
                                                          {"d-K-g=0", sec.checks[1].pass},
                                                          {"d-upsilon=0", sec.checks[2].pass},
                                                          {"schouten=0", sec.checks[3].pass}});
  return {std::move(sec), std::move(v)};
}

/// Largest torsion component of a linear connection over the sample.
inline double max_linear_torsion(const Model& m, const Sampling& s) {
  const LinearConnection& lin = m.connection.linear();
  double worst = 0.0;
  for (const auto& sp : s.points) worst = std::max(worst, torsion_linear(eval_linear(lin, sp.point.x)).max_abs());
  return worst;
}

/// Equivalence for a torsion-free linear connection of the symmetry of
/// nabla g, closedness of the 2-form and the Jacobi identity. Throws if
/// the connection carries torsion at tolerance.
inline SuiteResult check_torsion_free_equivalence(const Model& m, const Sampling& s, const Tolerances& tol) {
  const LinearConnection& lin = m.connection.linear();
  const double t = max_linear_torsion(m, s);
  if (!(t < tol.residual)) {
    throw VerificationError(VerificationError::Kind::HasTorsion,
                            "connection has torsion (max " + detail::format_double(t) + ")");
  }
  detail::Extremum sym(Comparison::Below), closed(Comparison::Below), jacobi(Comparison::Below);
  for (const auto& sp : s.points) {
    const PointData pd = sample_point(m.metric, m.connection, sp.point);
    const TangentPoint base{sp.point.x, std::vector<double>(sp.point.x.size(), 0.0)};
    const Tensor3 ng = covariant_derivative_g(eval_metric(m.metric, base), eval_linear(lin, sp.point.x));
    double asym = 0.0;
    const int n = ng.extent();
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) asym = std::max(asym, std::abs(ng(a, b, c) - ng(b, a, c)));
      }
    }
    sym.add(asym, sp.point);
    closed.add(two_form_differential(pd).max_abs(), sp.point);
    jacobi.add(schouten_bracket(pd).max_abs(), sp.point);
  }
  const int p = m.metric.unit_power();
  Section sec = detail::finish({"torsion-free-equivalence",
                                {sym.record("nabla-g-asymmetry", tol.residual, p),
                                 closed.record("d-upsilon", tol.residual, p),
                                 jacobi.record("schouten", tol.residual, -2 * p)}});
  Verdict v = detail::make_verdict("torsion-free-equivalence", {{"nabla-g-symmetric", sec.checks[0].pass},
                                                                {"d-upsilon=0", sec.checks[1].pass},
                                                                {"schouten=0", sec.checks[2].pass}});
  return {std::move(sec), std::move(v)};
}

// ---------------------------------------------------------------------------
// Finite-difference oracle

namespace detail {
inline double relative_deviation(std::span<const double> exact, std::span<const double> approx) {
  double diff = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    diff = std::max(diff, std::abs(exact[i] - approx[i]));
    scale = std::max(scale, std::abs(exact[i]));
  }
  return diff / scale;
}
}  // namespace detail

struct FdDeviation {
  double compatibility = 0.0;
  double d_upsilon = 0.0;
  double schouten = 0.0;
  double max() const { return std::max({compatibility, d_upsilon, schouten}); }
};

/// Relative deviation max|AD - FD| / max(1, max|AD|) of the
/// derivative-bearing objects at one point.
inline FdDeviation fd_deviation(const MetricField& g, const ConnectionField& k, const TangentPoint& p,
                                double step, const Chart* chart = nullptr) {
  const PointData ad = sample_point(g, k, p);
  const PointData fd = sample_point_fd(g, k, p, step, chart);
  return {detail::relative_deviation(vertical_compatibility_residual(ad).data(),
                                     vertical_compatibility_residual(fd).data()),
          detail::relative_deviation(two_form_differential(ad).data(), two_form_differential(fd).data()),
          detail::relative_deviation(schouten_bracket(ad).data(), schouten_bracket(fd).data())};
}

/// Recomputes the compatibility residual, the 2-form differential and the
/// Schouten bracket from central differences. Points whose stencil leaves
/// the chart are skipped and counted. Passes if at least the configured
/// fraction of evaluated points deviates by less than the tolerance.
inline Section fd_oracle(const Model& m, const Sampling& s, const Tolerances& tol) {
  detail::Extremum compat(Comparison::Below), dups(Comparison::Below), sch(Comparison::Below);
  int evaluated = 0, within = 0, skipped = 0;
  for (const auto& sp : s.points) {
    FdDeviation d;
    try {
      d = fd_deviation(m.metric, m.connection, sp.point, tol.fd_step, &m.chart);
    } catch (const FieldError&) {
      ++skipped;
      continue;
    } catch (const DomainError&) {
      ++skipped;
      continue;
    }
    ++evaluated;
    if (d.max() < tol.fd_relative) ++within;
    compat.add(d.compatibility, sp.point);
    dups.add(d.d_upsilon, sp.point);
    sch.add(d.schouten, sp.point);
  }
  const double fraction = evaluated == 0 ? 0.0 : static_cast<double>(within) / evaluated;
  Section sec{"fd-oracle",
              {compat.record("fd-vertical-compatibility", tol.fd_relative, 0),
               dups.record("fd-d-upsilon", tol.fd_relative, 0),
               sch.record("fd-schouten", tol.fd_relative, 0)}};
  CheckRecord frac;
  frac.name = "fd-fraction-within";
  frac.value = fraction;
  frac.tolerance = tol.fd_pass_fraction;
  frac.comparison = Comparison::Above;
  frac.pass = fraction >= tol.fd_pass_fraction;
  sec.skipped = skipped;
  sec.pass = frac.pass;
  // Individual maxima are informative; the fraction decides the section.
  for (auto& c : sec.checks) c.pass = c.value < c.tolerance;
  sec.checks.push_back(frac);
  return sec;
}

// ---------------------------------------------------------------------------
// Schouten bracket through closed constant 3-forms

/// [Lambda, Lambda]^{ABC} = 2 i(Lambda) d i(Lambda) beta for the constant
/// 3-form beta = e^A ^ e^B ^ e^C, with d by central differences.
inline MultivectorOnTE schouten_by_contraction(const MetricField& g, const ConnectionField& k,
                                               const TangentPoint& p, double step = 1e-5) {
  const int n = p.dim();
  const int e = 2 * n;
  const MultivectorOnTE lambda = spacetime_two_vector(g, k, p);
  std::vector<MultivectorOnTE> plus, minus;
  for (int a = 0; a < e; ++a) {
    TangentPoint up = p, down = p;
    (a < n ? up.x[a] : up.xdot[a - n]) += step;
    (a < n ? down.x[a] : down.xdot[a - n]) -= step;
    plus.push_back(spacetime_two_vector(g, k, up));
    minus.push_back(spacetime_two_vector(g, k, down));
  }
  MultivectorOnTE out(3, p, 2 * lambda.unit_power());
  for (int A = 0; A < e; ++A) {
    for (int B = A + 1; B < e; ++B) {
      for (int C = B + 1; C < e; ++C) {
        FormOnTE beta(3, p);
        beta.add_monomial({A, B, C}, 1.0);
        const FormOnTE d = exterior_derivative(1, p, 0, [&](const std::array<int, 3>& idx, int a) {
          const double hi = interior_bivector(plus[a], beta)[idx[0]];
          const double lo = interior_bivector(minus[a], beta)[idx[0]];
          return (hi - lo) / (2.0 * step);
        });
        out.add_monomial({A, B, C}, 2.0 * contract(lambda, d));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full report

struct Report {
  int dim = 0;
  std::vector<std::string> coordinates;
  std::string connection_kind;
  SampleSpec spec;
  Tolerances tolerances;
  int points_evaluated = 0;
  std::vector<SkippedPoint> skipped;
  bool valid = true;
  std::vector<Section> sections;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;

  bool all_pass() const {
    return valid && std::all_of(sections.begin(), sections.end(), [](const Section& s) { return s.pass; });
  }
  bool all_consistent() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.consistent; });
  }
  /// 0 all pass, 1 verification failure, 3 a theorem equivalence is violated.
  int exit_code() const {
    if (!all_consistent()) return 3;
    return all_pass() ? 0 : 1;
  }
  std::string outcome() const {
    switch (exit_code()) {
      case 0: return "pass";
      case 3: return "inconsistent";
      default: return "fail";
    }
  }
};

inline std::string connection_kind(const ConnectionField& k) {
  if (!k.is_linear()) return "general";
  return k.linear().levi_civita_metric() && k.linear().coefficients().empty() ? "levi-civita" : "linear";
}

/// Runs every applicable suite: the symplectic/Poisson pair always, the
/// linear equivalence for linear connections, the torsion-free
/// equivalence when the torsion vanishes, and the finite-difference oracle.
inline Report verify(const Model& m, const SampleSpec& spec, const Tolerances& tol) {
  Report r;
  r.dim = m.chart.dim();
  r.coordinates = m.chart.names();
  r.connection_kind = connection_kind(m.connection);
  r.spec = spec;
  r.tolerances = tol;
  const Sampling s = sample(m, spec);
  r.points_evaluated = static_cast<int>(s.points.size());
  r.skipped = s.skipped;
  r.valid = !s.points.empty() &&
            static_cast<double>(s.skipped.size()) <= tol.max_skip_fraction * static_cast<double>(s.requested);
  if (!r.valid) r.notes.push_back("more than the allowed fraction of sample points was skipped");

  Section symplectic = check_symplectic(m, s, tol);
  Section poisson = check_poisson(m, s, tol);
  Section conditions = check_conditions(m, s, tol);
  r.verdicts.push_back(verdict_symplectic_poisson(symplectic, poisson, conditions));
  r.sections.push_back(std::move(symplectic));
  r.sections.push_back(std::move(poisson));
  r.sections.push_back(std::move(conditions));

  if (m.connection.is_linear()) {
    SuiteResult lin = check_linear_equivalence(m, s, tol);
    r.sections.push_back(std::move(lin.section));
    r.verdicts.push_back(std::move(lin.verdict));
    if (max_linear_torsion(m, s) < tol.residual) {
      SuiteResult tf = check_torsion_free_equivalence(m, s, tol);
      r.sections.push_back(std::move(tf.section));
      r.verdicts.push_back(std::move(tf.verdict));
    } else {
      r.notes.push_back("torsion-free equivalence not applicable: connection has torsion");
    }
  }
  r.sections.push_back(fd_oracle(m, s, tol));
  return r;
}

}  // namespace tegeo
