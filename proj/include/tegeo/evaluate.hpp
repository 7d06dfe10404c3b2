#pragma once

// Single named geometric objects evaluated at one point, with text and
// machine-readable rendering.

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "tegeo/verify.hpp"

namespace tegeo {

class UnknownObjectError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>& object_names() {
  static const std::vector<std::string> names{"upsilon", "lambda", "d-upsilon", "schouten",    "torsion",
                                              "curvature", "nabla-g", "d-K-g",  "lie-K-gflat", "contraction"};
  return names;
}

struct EvaluatedObject {
  std::string name;
  int unit_power = 0;
  TangentPoint point;
  std::variant<double, FormOnTE, MultivectorOnTE, Tensor3> value;
  /// Meaning of the slots of a rank-3 array value.
  std::string slots;
};

/// Evaluates a named object at p. The point must lie in the chart.
inline EvaluatedObject evaluate_object(const Model& m, const std::string& name, const TangentPoint& p) {
  if (std::find(object_names().begin(), object_names().end(), name) == object_names().end()) {
    throw UnknownObjectError("unknown object '" + name + "'");
  }
  m.chart.require(p);
  const PointData pd = sample_point(m.metric, m.connection, p);
  const int up = m.metric.unit_power();
  EvaluatedObject o{name, 0, p, 0.0, ""};
  auto linear_pair = [&] {
    const TangentPoint base{p.x, std::vector<double>(p.x.size(), 0.0)};
    return std::pair{eval_metric(m.metric, base), eval_linear(m.connection.linear(), p.x)};
  };
  if (name == "upsilon") {
    o.value = spacetime_two_form(pd);
    o.unit_power = up;
  } else if (name == "lambda") {
    o.value = spacetime_two_vector(pd);
    o.unit_power = -up;
  } else if (name == "d-upsilon") {
    o.value = two_form_differential(pd);
    o.unit_power = up;
  } else if (name == "schouten") {
    o.value = schouten_bracket(pd);
    o.unit_power = -2 * up;
  } else if (name == "torsion") {
    o.value = torsion(pd);
    o.slots = "(l, m, nu): coefficient of d^l ^ d^m along the vertical direction nu";
  } else if (name == "curvature") {
    o.value = curvature(pd);
    o.slots = "(l, m, nu): coefficient of d^l ^ d^m along the vertical direction nu";
  } else if (name == "nabla-g") {
    const auto [mv, kv] = linear_pair();
    o.value = covariant_derivative_g(mv, kv);
    o.unit_power = up;
    o.slots = "(l, r, m): nabla_l g_{r m}";
  } else if (name == "d-K-g") {
    const auto [mv, kv] = linear_pair();
    o.value = covariant_differential_g(mv, kv);
    o.unit_power = up;
    o.slots = "(r, l, m): coefficient of d^l ^ d^m in the r-th component";
  } else if (name == "lie-K-gflat") {
    o.value = lie_derivative_gflat(pd);
    o.unit_power = up;
  } else {
    o.value = contract(spacetime_two_vector(pd), spacetime_two_form(pd));
  }
  return o;
}

namespace detail {

/// Basis label of index a over the 2n directions of TE, using the DSL symbols.
inline std::string basis_label(int a, int n) { return (a < n ? "x" : "v") + std::to_string(a % n); }

template <class F>
void for_each_increasing(int degree, int extent, F&& f) {
  std::array<int, 3> idx{0, 0, 0};
  for (idx[0] = 0; idx[0] < extent; ++idx[0]) {
    if (degree == 1) {
      f(idx);
      continue;
    }
    for (idx[1] = idx[0] + 1; idx[1] < extent; ++idx[1]) {
      if (degree == 2) {
        f(idx);
        continue;
      }
      for (idx[2] = idx[1] + 1; idx[2] < extent; ++idx[2]) f(idx);
    }
  }
}

}  // namespace detail

/// Text rendering: a header, the unit power, then one line per component.
/// Alternating arrays list the independent components (strictly increasing
/// indices); rank-3 arrays list every entry.
inline std::string format_object_text(const EvaluatedObject& o) {
  using detail::format_double;
  std::string s = o.name + " at " + describe(o.point) + "\n";
  s += "unit_power = " + std::to_string(o.unit_power) + "\n";
  const int n = o.point.dim();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          s += "value = " + format_double(v) + "\n";
        } else if constexpr (std::is_same_v<T, Tensor3>) {
          s += "slots " + o.slots + "\n";
          for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
              for (int c = 0; c < n; ++c) {
                s += "(" + std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c) +
                     ") = " + format_double(v(a, b, c)) + "\n";
              }
            }
          }
        } else {
          s += std::string(std::is_same_v<T, FormOnTE> ? "form" : "multivector") + " of degree " +
               std::to_string(v.degree()) + "\n";
          detail::for_each_increasing(v.degree(), 2 * n, [&](const std::array<int, 3>& idx) {
            s += "(";
            for (int k = 0; k < v.degree(); ++k) s += (k ? ", " : "") + detail::basis_label(idx[k], n);
            s += ") = " + format_double(v.at(idx)) + "\n";
          });
        }
      },
      o.value);
  return s;
}

/// Machine rendering: {object, unit_power, point, kind, ..., components}.
inline nlohmann::ordered_json object_json(const EvaluatedObject& o) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["object"] = o.name;
  j["unit_power"] = o.unit_power;
  j["point"] = ordered_json{{"x", o.point.x}, {"v", o.point.xdot}};
  const int n = o.point.dim();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          j["kind"] = "scalar";
          j["value"] = v;
        } else if constexpr (std::is_same_v<T, Tensor3>) {
          j["kind"] = "array3";
          j["slots"] = o.slots;
          j["extent"] = n;
          j["values"] = std::vector<double>(v.data().begin(), v.data().end());
        } else {
          j["kind"] = std::is_same_v<T, FormOnTE> ? "form" : "multivector";
          j["degree"] = v.degree();
          ordered_json comps = ordered_json::array();
          detail::for_each_increasing(v.degree(), 2 * n, [&](const std::array<int, 3>& idx) {
            comps.push_back(ordered_json{
                {"indices", std::vector<int>(idx.begin(), idx.begin() + v.degree())}, {"value", v.at(idx)}});
          });
          j["components"] = comps;
        }
      },
      o.value);
  return j;
}

}  // namespace tegeo
