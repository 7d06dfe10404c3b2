// Acceptance run: one PASS/FAIL line per criterion with its measured
// quantity and wall time. Exit status is nonzero if any criterion fails.
// The only argument is the path of the command-line tool.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tegeo/tegeo.hpp"

using namespace tegeo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

MetricField diagonal(const std::vector<std::string>& entries) {
  const int n = static_cast<int>(entries.size());
  std::vector<Expression> c;
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) c.push_back(l == m ? parse(entries[l], n) : Expression(0.0, n));
  }
  return {n, c};
}

Model gallery_model(const std::string& name) { return build_model(gallery_config(name)); }

SampleSpec spec_of(const std::string& name, int points, std::uint64_t seed) {
  SampleSpec s = gallery_config(name).sampling;
  s.points = points;
  s.seed = seed;
  return s;
}

std::string fmt(double v) { return detail::format_double(v); }

Outcome contraction_is_minus_dimension() {
  double worst = 0.0;
  int evaluated = 0;
  for (const auto& name : gallery_names()) {
    const Model m = gallery_model(name);
    const Sampling s = sample(m, spec_of(name, 100, 1001));
    for (const auto& sp : s.points) {
      const PointData pd = sample_point(m.metric, m.connection, sp.point);
      const double c = contract(spacetime_two_vector(pd), spacetime_two_form(pd));
      worst = std::max(worst, std::abs(c + m.chart.dim()));
      ++evaluated;
    }
  }
  return {worst < 1e-11 && evaluated >= 650, "max |i(Lambda)Upsilon + n| = " + fmt(worst) + " over " +
                                                 std::to_string(evaluated) + " points"};
}

Outcome schwarzschild_levi_civita() {
  const Model m = gallery_model("schwarzschild");
  const Sampling s = sample(m, spec_of("schwarzschild", 30, 42));
  double dups = 0.0, sch = 0.0, exact = 0.0;
  for (const auto& sp : s.points) {
    const PointData pd = sample_point(m.metric, m.connection, sp.point);
    dups = std::max(dups, two_form_differential(pd).max_abs());
    sch = std::max(sch, schouten_bracket(pd).max_abs());
    const FormOnTE u = spacetime_two_form(pd);
    const FormOnTE dg = metric_one_form_differential(m.metric, sp.point);
    for (std::size_t i = 0; i < u.data().size(); ++i) exact = std::max(exact, std::abs(u.data()[i] - dg.data()[i]));
  }
  return {s.points.size() == 30 && dups < 1e-9 && sch < 1e-9 && exact < 1e-10,
          "max|d Upsilon| = " + fmt(dups) + ", max|schouten| = " + fmt(sch) + ", |Upsilon - d gflat| = " + fmt(exact)};
}

Outcome linear_equivalence_on_random_connections() {
  std::mt19937_64 rng(2011);
  const MetricField metrics[] = {diagonal({"-1", "1", "1", "1"}), diagonal({"-1", "1 + x0^2", "1", "1"})};
  const LinearFamily families[] = {LinearFamily::Generic, LinearFamily::Compatible, LinearFamily::TorsionFree,
                                   LinearFamily::SymmetricNabla};
  int agree = 0, holds = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const MetricField& g = metrics[trial % 2];
    const Model m{Chart(4), g, random_linear_connection(rng, g, families[(trial / 2) % 4])};
    SampleSpec spec;
    spec.points = 10;
    spec.seed = rng();
    const SuiteResult r = check_linear_equivalence(m, sample(m, spec), {});
    agree += r.verdict.consistent;
    holds += r.verdict.members.front().holds;
  }
  return {agree == 50, std::to_string(agree) + "/50 consistent (" + std::to_string(holds) + " with all members true)"};
}

Outcome symmetric_nabla_case() {
  const Model m = gallery_model("symmetric-nabla");
  const Sampling s = sample(m, spec_of("symmetric-nabla", 30, 42));
  double nabla = 0.0, asym = 0.0, dups = 0.0, sch = 0.0;
  for (const auto& sp : s.points) {
    const Tensor3 ng = covariant_derivative_g(m.metric, m.connection, sp.point.x);
    nabla = std::max(nabla, ng.max_abs());
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        for (int c = 0; c < 4; ++c) asym = std::max(asym, std::abs(ng(a, b, c) - ng(b, a, c)));
      }
    }
    const PointData pd = sample_point(m.metric, m.connection, sp.point);
    dups = std::max(dups, two_form_differential(pd).max_abs());
    sch = std::max(sch, schouten_bracket(pd).max_abs());
  }
  return {nabla > 0.1 && asym < 1e-10 && dups < 1e-8 && sch < 1e-8,
          "max|nabla g| = " + fmt(nabla) + ", asymmetry = " + fmt(asym) + ", max|d Upsilon| = " + fmt(dups) +
              ", max|schouten| = " + fmt(sch)};
}

Outcome nonlinear_general_agreement() {
  const Model m = gallery_model("nonlinear-general");
  const Sampling s = sample(m, spec_of("nonlinear-general", 30, 42));
  const Tolerances tol;
  const Section sym = check_symplectic(m, s, tol), poi = check_poisson(m, s, tol), cond = check_conditions(m, s, tol);
  const Verdict v = verdict_symplectic_poisson(sym, poi, cond);
  std::string members;
  for (const auto& mem : v.members) members += (members.empty() ? "" : ", ") + mem.name + "=" + (mem.holds ? "T" : "F");
  return {v.consistent && s.points.size() == 30, members};
}

Outcome lie_derivative_coincidence() {
  std::mt19937_64 rng(2012);
  const MetricField g = diagonal({"-1", "1 + x0^2", "1", "1"});
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const LinearConnection k = random_linear_connection(rng, g, LinearFamily::Generic);
    TangentPoint p;
    for (int i = 0; i < 4; ++i) p.x.push_back(uniform(rng, -1, 1));
    for (int i = 0; i < 4; ++i) p.xdot.push_back(uniform(rng, -2, 2));
    const FormOnTE lie = lie_derivative_gflat(g, k, p);
    const Tensor3 dk = covariant_differential_g(g, k, p.x);
    for (int l = 0; l < 4; ++l) {
      for (int m = 0; m < 4; ++m) {
        double s = 0.0;
        for (int r = 0; r < 4; ++r) s += p.xdot[r] * dk(r, l, m);
        worst = std::max(worst, std::abs(lie(l, m) - s));
      }
    }
  }
  return {worst < 1e-12, "max deviation = " + fmt(worst)};
}

Outcome covariant_differential_identity() {
  std::mt19937_64 rng(2013);
  const MetricField g = diagonal({"-1", "1 + x0^2", "1", "1"});
  double worst = 0.0, torsion = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const LinearConnection k = random_linear_connection(rng, g, LinearFamily::Generic);
    std::vector<double> x;
    for (int i = 0; i < 4; ++i) x.push_back(uniform(rng, -1, 1));
    const Tensor3 d = covariant_differential_g(g, k, x);
    const Tensor3 nabla = covariant_derivative_g(g, k, x);
    const Tensor3 t = torsion_linear(eval_linear(k, x));
    torsion = std::max(torsion, t.max_abs());
    const MetricValue mv = eval_metric(g, {x, std::vector<double>(4, 0.0)});
    for (int r = 0; r < 4; ++r) {
      for (int l = 0; l < 4; ++l) {
        for (int m = 0; m < 4; ++m) {
          double gt = 0.0;
          for (int s = 0; s < 4; ++s) gt += mv.g(r, s) * t(l, m, s);
          worst = std::max(worst, std::abs(d(r, l, m) - (nabla(l, m, r) - nabla(m, l, r) - gt)));
        }
      }
    }
  }
  return {worst < 1e-10 && torsion > 0.1, "max deviation = " + fmt(worst) + " (max torsion " + fmt(torsion) + ")"};
}

Outcome derivative_oracles() {
  double worst = 0.0;
  int evaluated = 0, stencil_skips = 0;
  for (const auto& name : gallery_names()) {
    const Model m = gallery_model(name);
    const Tolerances tol = gallery_config(name).tolerances;
    const Sampling s = sample(m, spec_of(name, 30, 42));
    for (const auto& sp : s.points) {
      try {
        const FdDeviation d = fd_deviation(m.metric, m.connection, sp.point, tol.fd_step, &m.chart);
        worst = std::max({worst, d.compatibility, d.d_upsilon, d.schouten});
        ++evaluated;
      } catch (const FieldError&) {
        ++stencil_skips;
      }
    }
  }
  std::mt19937_64 rng(2014);
  const MetricField metrics[] = {diagonal({"-1", "1", "1", "1"}), diagonal({"-1", "1 + x0^2", "1", "1"})};
  double schouten = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const MetricField& g = metrics[trial % 2];
    ConnectionField k = random_linear_connection(rng, g, trial % 4 ? LinearFamily::Generic : LinearFamily::Compatible);
    if (trial % 5 == 4) k = gallery_model("nonlinear-general").connection;
    TangentPoint p;
    for (int i = 0; i < 4; ++i) p.x.push_back(uniform(rng, -1, 1));
    for (int i = 0; i < 4; ++i) p.xdot.push_back(uniform(rng, -2, 2));
    const PointData pd = sample_point(g, k, p);
    const MultivectorOnTE direct = schouten_bracket(pd);
    const MultivectorOnTE oracle = schouten_by_contraction(g, k, p);
    for (std::size_t i = 0; i < direct.data().size(); ++i) {
      schouten = std::max(schouten, std::abs(direct.data()[i] - oracle.data()[i]));
    }
  }
  return {worst < 1e-5 && schouten < 1e-8 && evaluated > 0,
          "max relative AD/FD deviation = " + fmt(worst) + " over " + std::to_string(evaluated) + " points (" +
              std::to_string(stencil_skips) + " stencils left the chart), schouten vs contraction = " + fmt(schouten)};
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  return status != -1 && WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_end_to_end(const std::string& tool) {
  if (tool.empty()) return {false, "no tool path given"};
  const auto dir = std::filesystem::temp_directory_path() / ("tegeo-acceptance-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, int>> expected{
      {"minkowski-metric", 0},  {"minkowski-zero-K", 0}, {"schwarzschild", 0},     {"symmetric-nabla", 0},
      {"dim5-flat", 0},         {"nonmetric-linear", 1}, {"nonlinear-general", 1}};
  bool ok = true;
  std::string got;
  for (const auto& [name, code] : expected) {
    const std::string cfg = (dir / (name + ".cfg")).string();
    const std::string quiet = " > /dev/null 2>&1";
    const int emit = run("\"" + tool + "\" examples emit " + name + " --out \"" + cfg + "\"" + quiet);
    const int check = emit == 0 ? run("\"" + tool + "\" check \"" + cfg + "\"" + quiet) : -1;
    ok = ok && emit == 0 && check == code;
    got += (got.empty() ? "" : ", ") + name + "=" + std::to_string(check);
  }
  std::filesystem::remove_all(dir);
  return {ok, got};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string tool = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"contraction equals minus the dimension", contraction_is_minus_dimension},
      {"schwarzschild levi-civita is symplectic and poisson", schwarzschild_levi_civita},
      {"linear equivalence on random connections", linear_equivalence_on_random_connections},
      {"non-metric symmetric-nabla connection", symmetric_nabla_case},
      {"nonlinear connection verdict agreement", nonlinear_general_agreement},
      {"lie derivative equals contracted covariant differential", lie_derivative_coincidence},
      {"covariant differential from nabla g and torsion", covariant_differential_identity},
      {"derivative and schouten oracles", derivative_oracles},
      {"command-line end to end", [&] { return cli_end_to_end(tool); }},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s criterion %zu: %s | %s | %.2f s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu/%zu criteria passed in %.2f s\n", criteria.size() - failures, criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
