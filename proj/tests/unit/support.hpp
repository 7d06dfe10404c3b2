#pragma once

#include <random>
#include <string>
#include <vector>

#include "tegeo/tegeo.hpp"

namespace support {

inline tegeo::MetricField diagonal_metric(const std::vector<std::string>& entries) {
  const int n = static_cast<int>(entries.size());
  std::vector<tegeo::Expression> c;
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) c.push_back(l == m ? tegeo::parse(entries[l], n) : tegeo::Expression(0.0, n));
  }
  return {n, c};
}

inline tegeo::MetricField minkowski(int n = 4) {
  std::vector<std::string> d(static_cast<std::size_t>(n), "1");
  d[0] = "-1";
  return diagonal_metric(d);
}

inline tegeo::MetricField schwarzschild() {
  return diagonal_metric({"-(1 - 2/x1)", "1/(1 - 2/x1)", "x1^2", "x1^2*sin(x2)^2"});
}

/// diag(-1, 1 + x0^2, 1, 1).
inline tegeo::MetricField stretched() { return diagonal_metric({"-1", "1 + x0^2", "1", "1"}); }

/// Flat metric in spherical-like coordinates on the last three axes.
inline tegeo::MetricField flat_spherical() { return diagonal_metric({"-1", "1", "x1^2", "x1^2*sin(x2)^2"}); }

inline tegeo::Chart schwarzschild_chart() {
  return tegeo::Chart(4, {"t", "r", "theta", "phi"},
                      {tegeo::parse("x1 - 2.2", 4), tegeo::parse("x2 - 0.1", 4), tegeo::parse("pi - 0.1 - x2", 4)});
}

inline tegeo::SampleSpec schwarzschild_box(int points = 30, std::uint64_t seed = 42) {
  tegeo::SampleSpec s;
  s.points = points;
  s.seed = seed;
  s.base_box = {{-1, 1}, {3, 15}, {0.2, 2.9}, {0, 6.28}};
  return s;
}

/// Linear connection with a single nonzero coefficient K_l^nu_m.
inline tegeo::LinearConnection single_coefficient(int n, int l, int nu, int m, const std::string& value) {
  std::vector<tegeo::Expression> k(static_cast<std::size_t>(n * n * n), tegeo::Expression(0.0, n));
  k[static_cast<std::size_t>((l * n + nu) * n + m)] = tegeo::parse(value, n);
  return {n, k};
}

inline tegeo::LinearConnection zero_linear(int n) { return single_coefficient(n, 0, 0, 0, "0"); }

inline tegeo::TangentPoint random_point(std::mt19937_64& rng, const std::vector<tegeo::Interval>& box, double vmax = 2.0) {
  tegeo::TangentPoint p;
  for (const auto& i : box) p.x.push_back(tegeo::uniform(rng, i.lo, i.hi));
  for (std::size_t i = 0; i < box.size(); ++i) p.xdot.push_back(tegeo::uniform(rng, -vmax, vmax));
  return p;
}

inline std::vector<tegeo::Interval> unit_box(int n) { return std::vector<tegeo::Interval>(static_cast<std::size_t>(n), {-1, 1}); }

/// K_l^nu = c v^nu v_l on Minkowski.
inline tegeo::GeneralConnection quadratic_velocity(double c, int n = 4) {
  std::vector<tegeo::Expression> k;
  for (int l = 0; l < n; ++l) {
    for (int nu = 0; nu < n; ++nu) {
      const double s = l == 0 ? -c : c;
      k.push_back(tegeo::Expression(s, n) * tegeo::Expression::velocity(nu, n) * tegeo::Expression::velocity(l, n));
    }
  }
  return {n, k};
}

inline tegeo::Model model_of(const std::string& gallery_name) {
  return tegeo::build_model(tegeo::gallery_config(gallery_name));
}

}  // namespace support
