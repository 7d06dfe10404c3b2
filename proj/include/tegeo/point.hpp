#pragma once

#include <string>
#include <vector>

#include "tegeo/expr.hpp"

namespace tegeo {

/// A point (x, xdot) of the tangent bundle in fibered coordinates.
struct TangentPoint {
  std::vector<double> x;
  std::vector<double> xdot;

  int dim() const { return static_cast<int>(x.size()); }
  friend bool operator==(const TangentPoint&, const TangentPoint&) = default;
};

inline Jet2 eval_jet2(const Expression& e, const TangentPoint& p) { return eval_jet2(e, p.x, p.xdot); }
inline double eval_value(const Expression& e, const TangentPoint& p) {
  return eval_value(e, p.x, p.xdot);
}

inline std::string describe(const TangentPoint& p) {
  auto list = [](const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += detail::format_double(v[i]);
    }
    return s + ")";
  };
  return "x=" + list(p.x) + " v=" + list(p.xdot);
}

}  // namespace tegeo
