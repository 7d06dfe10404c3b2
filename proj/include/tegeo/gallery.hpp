#pragma once

// Built-in example models.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "tegeo/config.hpp"

namespace tegeo {

namespace detail {

inline ModelConfig flat_model(int n, std::string kind) {
  ModelConfig c;
  c.dim = n;
  for (int i = 0; i < n; ++i) c.metric.push_back({{i, i}, i == 0 ? "-1" : "1", 0});
  c.connection_kind = std::move(kind);
  c.sampling.base_box.assign(static_cast<std::size_t>(n), Interval{-1.0, 1.0});
  c.sampling.velocity_box.assign(static_cast<std::size_t>(n), Interval{-2.0, 2.0});
  return c;
}

inline std::string vsym(int i) { return "v" + std::to_string(i); }
inline std::string xsym(int i) { return "x" + std::to_string(i); }

/// Minkowski with K_l^s_r = 1/2 eta^{ss} S_{lsr} for the fully symmetric
/// S with S_(012) = 1 and S_(113) = 1/2, so that nabla g = S.
inline ModelConfig symmetric_nabla_model() {
  ModelConfig c = flat_model(4, "linear");
  const int n = 4;
  Tensor3 s(n);
  auto set_sym = [&](int a, int b, int d, double v) {
    const std::array<std::array<int, 3>, 6> perms{
        {{a, b, d}, {a, d, b}, {b, a, d}, {b, d, a}, {d, a, b}, {d, b, a}}};
    for (const auto& p : perms) s(p[0], p[1], p[2]) = v;
  };
  set_sym(0, 1, 2, 1.0);
  set_sym(1, 1, 3, 0.5);
  for (int l = 0; l < n; ++l) {
    for (int sg = 0; sg < n; ++sg) {
      for (int r = 0; r < n; ++r) {
        const double eta = sg == 0 ? -1.0 : 1.0;
        const double a = 0.5 * eta * s(l, sg, r);
        if (a != 0.0) c.connection.push_back({{l, sg, r}, format_double(a), 0});
      }
    }
  }
  return c;
}

/// Minkowski with K_l^nu = 1/2 v^nu v_l + B_l^nu(x), B lowered antisymmetric
/// with B_01 = x2. Compatible with the metric but with nonzero cyclic
/// curvature.
inline ModelConfig nonlinear_general_model() {
  ModelConfig c = flat_model(4, "general");
  const int n = 4;
  for (int l = 0; l < n; ++l) {
    for (int nu = 0; nu < n; ++nu) {
      std::string e = (l == 0 ? "-0.5*" : "0.5*") + vsym(nu) + "*" + vsym(l);
      if ((l == 0 && nu == 1) || (l == 1 && nu == 0)) e += " + " + xsym(2);
      c.connection.push_back({{l, nu}, e, 0});
    }
  }
  return c;
}

}  // namespace detail

inline const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"minkowski-metric", "minkowski-zero-K", "schwarzschild",
                                              "nonmetric-linear", "symmetric-nabla",  "nonlinear-general",
                                              "dim5-flat"};
  return names;
}

/// One-line description of each built-in example.
inline std::string gallery_summary(const std::string& name) {
  if (name == "minkowski-metric") return "Minkowski metric with its Levi-Civita connection (identically zero)";
  if (name == "minkowski-zero-K") return "Minkowski metric with the zero linear connection";
  if (name == "schwarzschild") return "Schwarzschild exterior (M = 1) with its Levi-Civita connection";
  if (name == "nonmetric-linear") return "Minkowski metric with the linear connection K_0^1_2 = 1";
  if (name == "symmetric-nabla") return "torsion-free non-metric connection with symmetric nabla g";
  if (name == "nonlinear-general") return "Minkowski metric with a connection quadratic in the velocities";
  if (name == "dim5-flat") return "five-dimensional Minkowski metric with its Levi-Civita connection";
  throw std::invalid_argument("unknown example '" + name + "'");
}

inline ModelConfig gallery_config(const std::string& name) {
  using namespace detail;
  if (name == "minkowski-metric") return flat_model(4, "levi-civita");
  if (name == "minkowski-zero-K") return flat_model(4, "linear");
  if (name == "dim5-flat") return flat_model(5, "levi-civita");
  if (name == "nonmetric-linear") {
    ModelConfig c = flat_model(4, "linear");
    c.connection.push_back({{0, 1, 2}, "1", 0});
    return c;
  }
  if (name == "symmetric-nabla") return symmetric_nabla_model();
  if (name == "nonlinear-general") return nonlinear_general_model();
  if (name == "schwarzschild") {
    ModelConfig c;
    c.dim = 4;
    c.coordinates = {"t", "r", "theta", "phi"};
    c.guards = {{{}, "x1 - 2.2", 0}, {{}, "x2 - 0.1", 0}, {{}, "pi - 0.1 - x2", 0}};
    c.metric = {{{0, 0}, "-(1 - 2/x1)", 0},
                {{1, 1}, "1/(1 - 2/x1)", 0},
                {{2, 2}, "x1^2", 0},
                {{3, 3}, "x1^2*sin(x2)^2", 0}};
    c.connection_kind = "levi-civita";
    c.sampling.base_box = {{-1.0, 1.0}, {3.0, 15.0}, {0.2, 2.9}, {0.0, 6.28}};
    c.sampling.velocity_box.assign(4, Interval{-2.0, 2.0});
    return c;
  }
  throw std::invalid_argument("unknown example '" + name + "'");
}

/// Canonical file text of a built-in example.
inline std::string gallery_text(const std::string& name) { return emit_config(gallery_config(name)); }

}  // namespace tegeo
