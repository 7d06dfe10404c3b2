#pragma once

// Coordinate formulas for the objects a metric g and a spacetime connection
// K induce on TE. Every operation has a pointwise form over PointData (the
// values and first derivatives of g, g^-1 and K at one point) and a
// field-level form that samples the fields first.
//
// Sign conventions follow the source formulas verbatim: the Levi-Civita
// coefficients carry a leading -1/2 and the curvature a factor -2. Arrays
// that are antisymmetric in a pair of slots store the full tensor
// components, i.e. a coefficient c of d^l ^ d^m contributes c - (l<->m).

#include <functional>
#include <optional>
#include <utility>

#include "tegeo/fields.hpp"
#include "tegeo/forms.hpp"

namespace tegeo {

/// Values and first derivatives of the fields at one point of TE.
struct PointData {
  TangentPoint point;
  int n = 0;
  int metric_unit_power = 2;
  Eigen::MatrixXd g;
  Eigen::MatrixXd ginv;
  Tensor3 dg;     // (a, l, m) = d_a g_{lm}
  Tensor3 dginv;  // (a, l, m) = d_a g^{lm}
  GeneralConnectionValue k;
};

/// Samples g and K at p with exact (jet) derivatives.
inline PointData sample_point(const MetricField& g, const ConnectionField& k, const TangentPoint& p) {
  const int n = g.dim();
  if (k.dim() != n) throw FieldError(FieldError::Kind::DimensionMismatch, "metric/connection dimension mismatch");
  PointData pd;
  pd.point = p;
  pd.n = n;
  pd.metric_unit_power = g.unit_power();
  const MetricValue mv = eval_metric(g, p);
  pd.g = mv.g;
  pd.ginv = mv.inverse.components;
  pd.dg = Tensor3(n);
  pd.dginv = Tensor3(n);
  for (int a = 0; a < n; ++a) {
    Eigen::MatrixXd d(n, n);
    for (int l = 0; l < n; ++l) {
      for (int m = 0; m < n; ++m) {
        d(l, m) = mv.jet(l, m).gradient(a);
        pd.dg(a, l, m) = d(l, m);
      }
    }
    const Eigen::MatrixXd di = -pd.ginv * d * pd.ginv;
    for (int l = 0; l < n; ++l) {
      for (int m = 0; m < n; ++m) pd.dginv(a, l, m) = di(l, m);
    }
  }
  pd.k = eval_general(k, p);
  return pd;
}

/// Samples g and K at p, replacing every derivative by a central difference
/// of values with the given step. If a chart is given, every shifted point
/// must lie inside it.
inline PointData sample_point_fd(const MetricField& g, const ConnectionField& k, const TangentPoint& p,
                                 double step, const Chart* chart = nullptr) {
  const int n = g.dim();
  PointData pd;
  pd.point = p;
  pd.n = n;
  pd.metric_unit_power = g.unit_power();
  const MetricValue mv = eval_metric(g, p);
  pd.g = mv.g;
  pd.ginv = mv.inverse.components;
  pd.dg = Tensor3(n);
  pd.dginv = Tensor3(n);
  pd.k = GeneralConnectionValue{eval_general(k, p).k, Tensor3(n), Tensor3(n)};

  auto shifted = [&](int a, double h) {
    TangentPoint q = p;
    (a < n ? q.x[a] : q.xdot[a - n]) += h;
    if (chart) chart->require(q);
    return q;
  };
  for (int a = 0; a < 2 * n; ++a) {
    const TangentPoint up = shifted(a, step);
    const TangentPoint down = shifted(a, -step);
    const Eigen::MatrixXd kd = (eval_general(k, up).k - eval_general(k, down).k) / (2.0 * step);
    for (int l = 0; l < n; ++l) {
      for (int nu = 0; nu < n; ++nu) (a < n ? pd.k.dx : pd.k.dv)(l, nu, a % n) = kd(l, nu);
    }
    if (a >= n) continue;
    const MetricValue mu = eval_metric(g, up);
    const MetricValue md = eval_metric(g, down);
    const Eigen::MatrixXd d = (mu.g - md.g) / (2.0 * step);
    const Eigen::MatrixXd di = (mu.inverse.components - md.inverse.components) / (2.0 * step);
    for (int l = 0; l < n; ++l) {
      for (int m = 0; m < n; ++m) {
        pd.dg(a, l, m) = d(l, m);
        pd.dginv(a, l, m) = di(l, m);
      }
    }
  }
  return pd;
}

// ---------------------------------------------------------------------------
// Torsion and curvature

/// T(l, m, nu) = fiber_m K_l^nu - fiber_l K_m^nu.
inline Tensor3 torsion(const PointData& pd) {
  const int n = pd.n;
  Tensor3 t(n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) t(l, m, nu) = pd.k.dv(l, nu, m) - pd.k.dv(m, nu, l);
    }
  }
  return t;
}

inline Tensor3 torsion_general(const ConnectionField& k, const TangentPoint& p) {
  const int n = k.dim();
  PointData pd;
  pd.n = n;
  pd.k = eval_general(k, p);
  return torsion(pd);
}

/// Torsion of a linear connection, T(l, m, nu) = K_l^nu_m - K_m^nu_l.
inline Tensor3 torsion_linear(const LinearConnectionValue& k) {
  const int n = k.k.extent();
  Tensor3 t(n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) t(l, m, nu) = k.k(l, nu, m) - k.k(m, nu, l);
    }
  }
  return t;
}

/// R(l, m, nu) = -2 (A_{lm}^nu - A_{ml}^nu) with
/// A_{lm}^nu = d_l K_m^nu + K_l^r fiber_r K_m^nu.
inline Tensor3 curvature(const PointData& pd) {
  const int n = pd.n;
  Tensor3 a(n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        double s = pd.k.dx(m, nu, l);
        for (int r = 0; r < n; ++r) s += pd.k.k(l, r) * pd.k.dv(m, nu, r);
        a(l, m, nu) = s;
      }
    }
  }
  Tensor3 out(n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) out(l, m, nu) = -2.0 * (a(l, m, nu) - a(m, l, nu));
    }
  }
  return out;
}

inline Tensor3 curvature_general(const ConnectionField& k, const TangentPoint& p) {
  PointData pd;
  pd.n = k.dim();
  pd.k = eval_general(k, p);
  return curvature(pd);
}

/// R(l, m, nu, s) = -2 (B_{lm}^nu_s - B_{ml}^nu_s) with
/// B_{lm}^nu_s = d_l K_m^nu_s + K_l^r_s K_m^nu_r.
inline Tensor4 curvature_linear(const LinearConnectionValue& k) {
  const int n = k.k.extent();
  Tensor4 b(n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        for (int s = 0; s < n; ++s) {
          double v = k.dk(l, m, nu, s);
          for (int r = 0; r < n; ++r) v += k.k(l, r, s) * k.k(m, nu, r);
          b(l, m, nu, s) = v;
        }
      }
    }
  }
  Tensor4 out(n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        for (int s = 0; s < n; ++s) out(l, m, nu, s) = -2.0 * (b(l, m, nu, s) - b(m, l, nu, s));
      }
    }
  }
  return out;
}

inline Tensor4 curvature_linear(const LinearConnection& k, const std::vector<double>& x) {
  return curvature_linear(eval_linear(k, x));
}

// ---------------------------------------------------------------------------
// The 2-form and 2-vector on TE

/// g_{lm} (fiber d^l - K_nu^l d^nu) ^ d^m.
inline FormOnTE spacetime_two_form(const PointData& pd) {
  const int n = pd.n;
  FormOnTE u(2, pd.point, pd.metric_unit_power);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) u.add_monomial({n + l, m, 0}, pd.g(l, m));
  }
  for (int nu = 0; nu < n; ++nu) {
    for (int m = 0; m < n; ++m) {
      double c = 0.0;
      for (int l = 0; l < n; ++l) c += pd.g(l, m) * pd.k.k(nu, l);
      u.add_monomial({nu, m, 0}, -c);
    }
  }
  return u;
}

/// g^{lm} (d_l + K_l^nu fiber_nu) ^ fiber_m.
inline MultivectorOnTE spacetime_two_vector(const PointData& pd) {
  const int n = pd.n;
  MultivectorOnTE p(2, pd.point, -pd.metric_unit_power);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) p.add_monomial({l, n + m, 0}, pd.ginv(l, m));
  }
  for (int nu = 0; nu < n; ++nu) {
    for (int m = 0; m < n; ++m) {
      double c = 0.0;
      for (int l = 0; l < n; ++l) c += pd.ginv(l, m) * pd.k.k(l, nu);
      p.add_monomial({n + nu, n + m, 0}, c);
    }
  }
  return p;
}

inline FormOnTE spacetime_two_form(const MetricField& g, const ConnectionField& k, const TangentPoint& p) {
  return spacetime_two_form(sample_point(g, k, p));
}
inline MultivectorOnTE spacetime_two_vector(const MetricField& g, const ConnectionField& k,
                                            const TangentPoint& p) {
  return spacetime_two_vector(sample_point(g, k, p));
}

/// Exterior differential of the 2-form, expanded in coordinates:
///   -(d_l g_{r nu} K_m^r + g_{r nu} d_l K_m^r) d^l ^ d^m ^ d^nu
///   -(d_m g_{l nu} + g_{r nu} fiber_l K_m^r) fiber d^l ^ d^m ^ d^nu.
inline FormOnTE two_form_differential(const PointData& pd) {
  const int n = pd.n;
  FormOnTE out(3, pd.point, pd.metric_unit_power);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        double base = 0.0;
        double mixed = pd.dg(m, l, nu);
        for (int r = 0; r < n; ++r) {
          base += pd.dg(l, r, nu) * pd.k.k(m, r) + pd.g(r, nu) * pd.k.dx(m, r, l);
          mixed += pd.g(r, nu) * pd.k.dv(m, r, l);
        }
        out.add_monomial({l, m, nu}, -base);
        out.add_monomial({n + l, m, nu}, -mixed);
      }
    }
  }
  return out;
}

inline FormOnTE two_form_differential(const MetricField& g, const ConnectionField& k,
                                      const TangentPoint& p) {
  return two_form_differential(sample_point(g, k, p));
}

/// The 1-form g_{lm} xdot^l d^m on TE.
inline FormOnTE metric_one_form(const MetricField& g, const TangentPoint& p) {
  const MetricValue mv = eval_metric(g, p);
  const int n = g.dim();
  FormOnTE out(1, p, g.unit_power());
  auto raw = out.raw();
  for (int m = 0; m < n; ++m) {
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += mv.g(l, m) * p.xdot[l];
    raw[m] = s;
  }
  return out;
}

/// d of the metric 1-form, from the exact coefficient gradients
/// d_a (g_{lm} xdot^l) and fiber_a (g_{lm} xdot^l) = g_{am}.
inline FormOnTE metric_one_form_differential(const MetricField& g, const TangentPoint& p) {
  const MetricValue mv = eval_metric(g, p);
  const int n = g.dim();
  return exterior_derivative(1, p, g.unit_power(), [&](const std::array<int, 3>& idx, int a) {
    const int m = idx[0];
    if (m >= n) return 0.0;
    if (a >= n) return mv.g(a - n, m);
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += mv.jet(l, m).gradient(a) * p.xdot[l];
    return s;
  });
}

// ---------------------------------------------------------------------------
// Closure conditions

/// (nu, l, m): d_nu g_{lm} + g_{rm} fiber_l K_nu^r - d_m g_{l nu} - g_{r nu} fiber_l K_m^r.
inline Tensor3 vertical_compatibility_residual(const PointData& pd) {
  const int n = pd.n;
  Tensor3 out(n);
  for (int nu = 0; nu < n; ++nu) {
    for (int l = 0; l < n; ++l) {
      for (int m = 0; m < n; ++m) {
        double s = pd.dg(nu, l, m) - pd.dg(m, l, nu);
        for (int r = 0; r < n; ++r) {
          s += pd.g(r, m) * pd.k.dv(nu, r, l) - pd.g(r, nu) * pd.k.dv(m, r, l);
        }
        out(nu, l, m) = s;
      }
    }
  }
  return out;
}

/// Curvature with its vertical index lowered: R(l, m, nu) = g_{r nu} R_{lm}^r.
inline Tensor3 lowered_curvature(const PointData& pd, const Tensor3& r) {
  const int n = pd.n;
  Tensor3 out(n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        double s = 0.0;
        for (int q = 0; q < n; ++q) s += pd.g(q, nu) * r(l, m, q);
        out(l, m, nu) = s;
      }
    }
  }
  return out;
}

template <class T>
Tensor3 cyclic_sum(const T& r, int n) {
  Tensor3 out(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) out(a, b, c) = r(a, b, c) + r(b, c, a) + r(c, a, b);
    }
  }
  return out;
}

/// Cyclic sum of the lowered curvature.
inline Tensor3 cyclic_curvature_residual(const PointData& pd) {
  return cyclic_sum(lowered_curvature(pd, curvature(pd)), pd.n);
}

inline Tensor3 vertical_compatibility_residual(const MetricField& g, const ConnectionField& k,
                                               const TangentPoint& p) {
  return vertical_compatibility_residual(sample_point(g, k, p));
}
inline Tensor3 cyclic_curvature_residual(const MetricField& g, const ConnectionField& k,
                                         const TangentPoint& p) {
  return cyclic_curvature_residual(sample_point(g, k, p));
}

// ---------------------------------------------------------------------------
// Lie derivatives of the metric 1-form and the covariant differential

/// L[K] of the metric 1-form: (d_l g_{rm} xdot^r + g_{rm} K_l^r) d^l ^ d^m.
inline FormOnTE lie_derivative_gflat(const PointData& pd) {
  const int n = pd.n;
  FormOnTE out(2, pd.point, pd.metric_unit_power);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      double c = 0.0;
      for (int r = 0; r < n; ++r) c += pd.dg(l, r, m) * pd.point.xdot[r] + pd.g(r, m) * pd.k.k(l, r);
      out.add_monomial({l, m, 0}, c);
    }
  }
  return out;
}

/// L[I] L[K] of the metric 1-form, I the Liouville field:
/// xdot^r (d_l g_{rm} + g_{sm} fiber_r K_l^s) d^l ^ d^m.
inline FormOnTE liouville_lie_derivative_gflat(const PointData& pd) {
  const int n = pd.n;
  FormOnTE out(2, pd.point, pd.metric_unit_power);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      double c = 0.0;
      for (int r = 0; r < n; ++r) {
        double inner = pd.dg(l, r, m);
        for (int s = 0; s < n; ++s) inner += pd.g(s, m) * pd.k.dv(l, s, r);
        c += pd.point.xdot[r] * inner;
      }
      out.add_monomial({l, m, 0}, c);
    }
  }
  return out;
}

inline FormOnTE lie_derivative_gflat(const MetricField& g, const ConnectionField& k, const TangentPoint& p) {
  return lie_derivative_gflat(sample_point(g, k, p));
}
inline FormOnTE liouville_lie_derivative_gflat(const MetricField& g, const ConnectionField& k,
                                               const TangentPoint& p) {
  return liouville_lie_derivative_gflat(sample_point(g, k, p));
}

/// d_K g for a linear connection, indexed (r; l, m):
/// (d_l g_{rm} + g_{sm} K_l^s_r) - (l <-> m).
inline Tensor03Value covariant_differential_g(const MetricValue& mv, const LinearConnectionValue& k) {
  const int n = static_cast<int>(mv.g.rows());
  Tensor3 e(n);
  for (int r = 0; r < n; ++r) {
    for (int l = 0; l < n; ++l) {
      for (int m = 0; m < n; ++m) {
        double s = mv.jet(r, m).gradient(l);
        for (int q = 0; q < n; ++q) s += mv.g(q, m) * k.k(l, q, r);
        e(r, l, m) = s;
      }
    }
  }
  Tensor3 out(n);
  for (int r = 0; r < n; ++r) {
    for (int l = 0; l < n; ++l) {
      for (int m = 0; m < n; ++m) out(r, l, m) = e(r, l, m) - e(r, m, l);
    }
  }
  return out;
}

/// nabla g indexed (l, r, m) = nabla_l g_{rm} = d_l g_{rm} + g_{sm} K_l^s_r + g_{rs} K_l^s_m.
/// The convention makes the Levi-Civita connection metric.
inline Tensor03Value covariant_derivative_g(const MetricValue& mv, const LinearConnectionValue& k) {
  const int n = static_cast<int>(mv.g.rows());
  Tensor3 out(n);
  for (int l = 0; l < n; ++l) {
    for (int r = 0; r < n; ++r) {
      for (int m = 0; m < n; ++m) {
        double s = mv.jet(r, m).gradient(l);
        for (int q = 0; q < n; ++q) s += mv.g(q, m) * k.k(l, q, r) + mv.g(r, q) * k.k(l, q, m);
        out(l, r, m) = s;
      }
    }
  }
  return out;
}

namespace detail {
inline std::pair<MetricValue, LinearConnectionValue> eval_linear_pair(const MetricField& g,
                                                                      const ConnectionField& k,
                                                                      const std::vector<double>& x) {
  const LinearConnection& lin = k.linear();
  const TangentPoint base{x, std::vector<double>(x.size(), 0.0)};
  return {eval_metric(g, base), eval_linear(lin, x)};
}
}  // namespace detail

inline Tensor03Value covariant_differential_g(const MetricField& g, const ConnectionField& k,
                                              const std::vector<double>& x) {
  const auto [mv, kv] = detail::eval_linear_pair(g, k, x);
  return covariant_differential_g(mv, kv);
}

inline Tensor03Value covariant_derivative_g(const MetricField& g, const ConnectionField& k,
                                            const std::vector<double>& x) {
  const auto [mv, kv] = detail::eval_linear_pair(g, k, x);
  return covariant_derivative_g(mv, kv);
}

// ---------------------------------------------------------------------------
// Schouten bracket of the 2-vector and its raised-index conditions

namespace detail {

/// Q(l, m, nu) = g^{r nu} (d_r g^{lm} - g^{sl} fiber_s K_r^m).
inline Tensor3 schouten_mixed_factor(const PointData& pd) {
  const int n = pd.n;
  Tensor3 q(n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        double s = 0.0;
        for (int r = 0; r < n; ++r) {
          double inner = pd.dginv(r, l, m);
          for (int t = 0; t < n; ++t) inner -= pd.ginv(t, l) * pd.k.dv(r, m, t);
          s += pd.ginv(r, nu) * inner;
        }
        q(l, m, nu) = s;
      }
    }
  }
  return q;
}

/// g^{kr} g^{ms} C(r, s, nu) for a curvature-shaped array C.
inline Tensor3 raise_curvature(const PointData& pd, const Tensor3& c) {
  const int n = pd.n;
  Tensor3 out(n);
  for (int kk = 0; kk < n; ++kk) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        double s = 0.0;
        for (int r = 0; r < n; ++r) {
          for (int t = 0; t < n; ++t) s += pd.ginv(kk, r) * pd.ginv(m, t) * c(r, t, nu);
        }
        out(kk, m, nu) = s;
      }
    }
  }
  return out;
}

}  // namespace detail

/// [Lambda, Lambda] in coordinates:
///   2 Q(l, m, nu) (d_l + K_l^k fiber_k) ^ fiber_m ^ fiber_nu + Rup(k, m, nu) fiber_k ^ fiber_m ^ fiber_nu,
/// where Rup = g^{kr} g^{ms} R_{rs}^nu and R_{rs}^nu is the antisymmetric
/// coefficient of d^r ^ d^s, i.e. half the stored curvature components.
inline MultivectorOnTE schouten_bracket(const PointData& pd) {
  const int n = pd.n;
  const Tensor3 q = detail::schouten_mixed_factor(pd);
  Tensor3 half_curvature = curvature(pd);
  for (double& v : half_curvature.data()) v *= 0.5;
  const Tensor3 rup = detail::raise_curvature(pd, half_curvature);

  MultivectorOnTE out(3, pd.point, -2 * pd.metric_unit_power);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) out.add_monomial({l, n + m, n + nu}, 2.0 * q(l, m, nu));
    }
  }
  for (int kk = 0; kk < n; ++kk) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        double c = rup(kk, m, nu);
        for (int l = 0; l < n; ++l) c += 2.0 * q(l, m, nu) * pd.k.k(l, kk);
        out.add_monomial({n + kk, n + m, n + nu}, c);
      }
    }
  }
  return out;
}

inline MultivectorOnTE schouten_bracket(const MetricField& g, const ConnectionField& k,
                                        const TangentPoint& p) {
  return schouten_bracket(sample_point(g, k, p));
}

/// Sign of the second term in the raised compatibility residual.
/// `Derived` follows from antisymmetrizing the Schouten coefficient;
/// `Printed` flips it to the alternative sign, kept for comparison.
enum class RaisedSign { Derived, Printed };

/// (l, m, nu): Q(l, m, nu) - g^{rm} (d_r g^{l nu} -/+ g^{sl} fiber_s K_r^nu).
inline Tensor3 raised_compatibility_residual(const PointData& pd, RaisedSign sign = RaisedSign::Derived) {
  const int n = pd.n;
  const Tensor3 q = detail::schouten_mixed_factor(pd);
  Tensor3 out(n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        if (sign == RaisedSign::Derived) {
          out(l, m, nu) = q(l, m, nu) - q(l, nu, m);
          continue;
        }
        double s = 0.0;
        for (int r = 0; r < n; ++r) {
          double inner = pd.dginv(r, l, nu);
          for (int t = 0; t < n; ++t) inner += pd.ginv(t, l) * pd.k.dv(r, nu, t);
          s += pd.ginv(r, m) * inner;
        }
        out(l, m, nu) = q(l, m, nu) - s;
      }
    }
  }
  return out;
}

/// Cyclic sum of g^{kr} g^{ms} R(r, s, nu) over the stored curvature.
inline Tensor3 raised_cyclic_curvature_residual(const PointData& pd) {
  return cyclic_sum(detail::raise_curvature(pd, curvature(pd)), pd.n);
}

struct RaisedResiduals {
  Tensor3 compatibility;
  Tensor3 cyclic_curvature;
};

inline RaisedResiduals raised_residuals(const MetricField& g, const ConnectionField& k, const TangentPoint& p) {
  const PointData pd = sample_point(g, k, p);
  return {raised_compatibility_residual(pd), raised_cyclic_curvature_residual(pd)};
}

}  // namespace tegeo
