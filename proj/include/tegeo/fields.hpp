#pragma once

// Chart-level field objects: the chart, the metric on E and the spacetime
// connection on TE, plus their pointwise evaluation with exact jets.

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tegeo/expr.hpp"
#include "tegeo/forms.hpp"
#include "tegeo/point.hpp"
#include "tegeo/tensor.hpp"

namespace tegeo {

class FieldError : public std::runtime_error {
 public:
  enum class Kind {
    InvalidChart,
    InvalidMetric,
    InvalidConnection,
    SingularMetric,
    WrongSignature,
    PointOutsideChart,
    DimensionMismatch,
    NotLinear,
  };

  FieldError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Eigenvalues within this distance of zero count as degenerate.
inline constexpr double kSignatureTolerance = 1e-10;

class Chart {
 public:
  explicit Chart(int dim, std::vector<std::string> names = {}, std::vector<Expression> guards = {})
      : dim_(dim), names_(std::move(names)), guards_(std::move(guards)) {
    if (dim_ < 3) throw FieldError(FieldError::Kind::InvalidChart, "chart dimension must be >= 3");
    if (names_.empty()) {
      for (int i = 0; i < dim_; ++i) names_.push_back("x" + std::to_string(i));
    }
    if (static_cast<int>(names_.size()) != dim_) {
      throw FieldError(FieldError::Kind::InvalidChart, "chart needs one name per coordinate");
    }
    for (const auto& g : guards_) {
      if (g.dim() != dim_) throw FieldError(FieldError::Kind::InvalidChart, "guard dimension mismatch");
      if (g.uses_velocity()) {
        throw FieldError(FieldError::Kind::InvalidChart, "guards may only depend on coordinates");
      }
    }
  }

  int dim() const { return dim_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Expression>& guards() const { return guards_; }

  /// Reason the point is outside the chart domain, if it is.
  std::optional<std::string> rejection(const TangentPoint& p) const {
    if (p.dim() != dim_ || static_cast<int>(p.xdot.size()) != dim_) {
      return "point dimension does not match chart dimension " + std::to_string(dim_);
    }
    for (const auto& g : guards_) {
      try {
        if (!(eval_value(g, p) > 0.0)) return "guard " + g.print() + " not positive";
      } catch (const DomainError& e) {
        return std::string("guard undefined: ") + e.what();
      }
    }
    return std::nullopt;
  }

  bool admits(const TangentPoint& p) const { return !rejection(p).has_value(); }

  void require(const TangentPoint& p) const {
    if (auto why = rejection(p)) throw FieldError(FieldError::Kind::PointOutsideChart, *why);
  }

 private:
  int dim_;
  std::vector<std::string> names_;
  std::vector<Expression> guards_;
};

/// Symmetric n x n array of coordinate expressions g_{lm} with Lorentzian
/// signature. `unit_power` is inert bookkeeping of the length scale.
class MetricField {
 public:
  MetricField(int dim, std::vector<Expression> components, int unit_power = 2)
      : dim_(dim), components_(std::move(components)), unit_power_(unit_power) {
    if (static_cast<int>(components_.size()) != dim_ * dim_) {
      throw FieldError(FieldError::Kind::InvalidMetric, "metric needs n*n components");
    }
    for (int l = 0; l < dim_; ++l) {
      for (int m = 0; m < dim_; ++m) {
        const Expression& e = component(l, m);
        if (e.dim() != dim_) throw FieldError(FieldError::Kind::InvalidMetric, "component dimension mismatch");
        if (e.uses_velocity()) {
          throw FieldError(FieldError::Kind::InvalidMetric,
                           "metric component g" + std::to_string(l) + std::to_string(m) +
                               " uses a velocity symbol");
        }
        if (m > l && e.print() != component(m, l).print()) {
          throw FieldError(FieldError::Kind::InvalidMetric,
                           "metric is not symmetric at (" + std::to_string(l) + "," +
                               std::to_string(m) + ")");
        }
      }
    }
  }

  /// Metric from its upper triangle (row-major, l <= m).
  static MetricField from_upper(int dim, const std::vector<Expression>& upper, int unit_power = 2) {
    std::vector<Expression> full(static_cast<std::size_t>(dim * dim));
    std::size_t k = 0;
    for (int l = 0; l < dim; ++l) {
      for (int m = l; m < dim; ++m) {
        full[static_cast<std::size_t>(l * dim + m)] = upper.at(k);
        full[static_cast<std::size_t>(m * dim + l)] = upper.at(k);
        ++k;
      }
    }
    return {dim, std::move(full), unit_power};
  }

  int dim() const { return dim_; }
  int unit_power() const { return unit_power_; }
  const Expression& component(int l, int m) const {
    return components_[static_cast<std::size_t>(l * dim_ + m)];
  }

 private:
  int dim_;
  std::vector<Expression> components_;
  int unit_power_;
};

/// g^{lm} at a point.
struct DualMetricValue {
  Eigen::MatrixXd components;
};

struct MetricValue {
  Eigen::MatrixXd g;
  DualMetricValue inverse;
  std::vector<Jet2> jets;  // row-major; derivatives over (x, xdot)
  Eigen::VectorXd eigenvalues;

  const Jet2& jet(int l, int m) const {
    return jets[static_cast<std::size_t>(l * g.rows() + m)];
  }
};

/// Evaluates g, its inverse and second-order jets at p; verifies the
/// signature (1, n-1).
inline MetricValue eval_metric(const MetricField& metric, const TangentPoint& p) {
  const int n = metric.dim();
  if (p.dim() != n || static_cast<int>(p.xdot.size()) != n) {
    throw FieldError(FieldError::Kind::DimensionMismatch, "point does not match metric dimension");
  }
  MetricValue out;
  out.g.resize(n, n);
  out.jets.reserve(static_cast<std::size_t>(n * n));
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      if (m < l) {
        Jet2 mirrored = out.jet(m, l);
        out.jets.push_back(std::move(mirrored));
      } else {
        out.jets.push_back(eval_jet2(metric.component(l, m), p));
      }
      out.g(l, m) = out.jets.back().value();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.g, Eigen::EigenvaluesOnly);
  out.eigenvalues = solver.eigenvalues();
  int negative = 0;
  for (int i = 0; i < n; ++i) {
    const double ev = out.eigenvalues(i);
    if (std::abs(ev) <= kSignatureTolerance) {
      throw FieldError(FieldError::Kind::SingularMetric, "singular metric at " + describe(p));
    }
    if (ev < 0) ++negative;
  }
  if (negative != 1) {
    throw FieldError(FieldError::Kind::WrongSignature,
                     "metric signature is (" + std::to_string(negative) + "," +
                         std::to_string(n - negative) + "), expected (1," + std::to_string(n - 1) +
                         ") at " + describe(p));
  }
  out.inverse.components = out.g.inverse();
  return out;
}

/// Linear connection K_l^nu_m(x). The coefficients are the sum of an
/// optional Levi-Civita part of a metric and an optional expression array
/// indexed [l][nu][m].
class LinearConnection {
 public:
  LinearConnection(int dim, std::vector<Expression> coefficients)
      : dim_(dim), coefficients_(std::move(coefficients)) {
    validate();
  }

  LinearConnection(MetricField levi_civita_of, std::vector<Expression> offset = {})
      : dim_(levi_civita_of.dim()),
        levi_civita_(std::move(levi_civita_of)),
        coefficients_(std::move(offset)) {
    validate();
  }

  int dim() const { return dim_; }
  const std::optional<MetricField>& levi_civita_metric() const { return levi_civita_; }
  /// Expression part; empty when the connection is purely Levi-Civita.
  const std::vector<Expression>& coefficients() const { return coefficients_; }
  const Expression& coefficient(int l, int nu, int m) const {
    return coefficients_[static_cast<std::size_t>((l * dim_ + nu) * dim_ + m)];
  }

 private:
  void validate() const {
    if (dim_ < 1) throw FieldError(FieldError::Kind::InvalidConnection, "bad connection dimension");
    if (coefficients_.empty()) {
      if (!levi_civita_) {
        throw FieldError(FieldError::Kind::InvalidConnection, "linear connection needs coefficients");
      }
      return;
    }
    if (static_cast<int>(coefficients_.size()) != dim_ * dim_ * dim_) {
      throw FieldError(FieldError::Kind::InvalidConnection, "linear connection needs n^3 coefficients");
    }
    for (const auto& e : coefficients_) {
      if (e.dim() != dim_) {
        throw FieldError(FieldError::Kind::InvalidConnection, "coefficient dimension mismatch");
      }
      if (e.uses_velocity()) {
        throw FieldError(FieldError::Kind::InvalidConnection,
                         "linear connection coefficient uses a velocity symbol: " + e.print());
      }
    }
  }

  int dim_;
  std::optional<MetricField> levi_civita_;
  std::vector<Expression> coefficients_;
};

/// General connection K_l^nu(x, xdot), either an expression array indexed
/// [l][nu] or a linear connection seen through K_l^nu = K_l^nu_m xdot^m.
class GeneralConnection {
 public:
  GeneralConnection(int dim, std::vector<Expression> components)
      : dim_(dim), source_(std::move(components)) {
    const auto& c = std::get<0>(source_);
    if (static_cast<int>(c.size()) != dim_ * dim_) {
      throw FieldError(FieldError::Kind::InvalidConnection, "general connection needs n*n components");
    }
    for (const auto& e : c) {
      if (e.dim() != dim_) {
        throw FieldError(FieldError::Kind::InvalidConnection, "component dimension mismatch");
      }
    }
  }
  explicit GeneralConnection(LinearConnection linear) : dim_(linear.dim()), source_(std::move(linear)) {}

  int dim() const { return dim_; }
  bool is_expressions() const { return source_.index() == 0; }
  const std::vector<Expression>& components() const { return std::get<0>(source_); }
  const Expression& component(int l, int nu) const {
    return components()[static_cast<std::size_t>(l * dim_ + nu)];
  }
  const LinearConnection& promoted_from() const { return std::get<1>(source_); }

 private:
  int dim_;
  std::variant<std::vector<Expression>, LinearConnection> source_;
};

/// K_l^nu = K_l^nu_m xdot^m. Expression-only linear connections are
/// rewritten as expression trees; a Levi-Civita part is carried through.
inline GeneralConnection promote_linear(const LinearConnection& k) {
  if (k.levi_civita_metric()) return GeneralConnection(k);
  const int n = k.dim();
  std::vector<Expression> out;
  out.reserve(static_cast<std::size_t>(n * n));
  for (int l = 0; l < n; ++l) {
    for (int nu = 0; nu < n; ++nu) {
      std::optional<Expression> sum;
      for (int m = 0; m < n; ++m) {
        const Expression& c = k.coefficient(l, nu, m);
        if (c.is_zero_literal()) continue;
        Expression term = c * Expression::velocity(m, n);
        sum = sum ? *sum + term : term;
      }
      out.push_back(sum ? *sum : Expression(0.0, n));
    }
  }
  return {n, std::move(out)};
}

class ConnectionField {
 public:
  ConnectionField(GeneralConnection k) : k_(std::move(k)) {}  // NOLINT(google-explicit-constructor)
  ConnectionField(LinearConnection k) : k_(std::move(k)) {}   // NOLINT(google-explicit-constructor)

  int dim() const {
    return std::visit([](const auto& k) { return k.dim(); }, k_);
  }
  bool is_linear() const { return k_.index() == 1; }
  const LinearConnection& linear() const {
    if (!is_linear()) throw FieldError(FieldError::Kind::NotLinear, "connection is not linear");
    return std::get<1>(k_);
  }
  const GeneralConnection& general() const { return std::get<0>(k_); }

 private:
  std::variant<GeneralConnection, LinearConnection> k_;
};

inline LinearConnection levi_civita(const MetricField& g) { return LinearConnection(g); }

/// K_l^nu_m(x) with its base derivatives d_a K_l^nu_m.
struct LinearConnectionValue {
  Tensor3 k;   // (l, nu, m)
  Tensor4 dk;  // (a, l, nu, m)
};

/// K_l^nu(x, xdot) with base and fiber derivatives.
struct GeneralConnectionValue {
  Eigen::MatrixXd k;  // (l, nu)
  Tensor3 dx;         // (l, nu, a) = d_a K_l^nu
  Tensor3 dv;         // (l, nu, a) = fiber derivative along xdot^a
};

/// Levi-Civita coefficients K_m^l_nu = -1/2 g^{lr}(d_m g_{r nu} + d_nu g_{r m} - d_r g_{m nu})
/// and their first derivatives, from the second-order metric jets.
inline LinearConnectionValue eval_levi_civita(const MetricValue& mv) {
  const int n = static_cast<int>(mv.g.rows());
  const Eigen::MatrixXd& gi = mv.inverse.components;
  auto dg = [&](int a, int l, int m) { return mv.jet(l, m).gradient(a); };
  auto ddg = [&](int a, int b, int l, int m) { return mv.jet(l, m).hessian(a, b); };

  // Lowered symbol L_{r m nu} = d_m g_{r nu} + d_nu g_{r m} - d_r g_{m nu}.
  Tensor3 lowered(n);
  Tensor4 lowered_d(n);  // (a, r, m, nu)
  for (int r = 0; r < n; ++r) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        lowered(r, m, nu) = dg(m, r, nu) + dg(nu, r, m) - dg(r, m, nu);
        for (int a = 0; a < n; ++a) {
          lowered_d(a, r, m, nu) = ddg(a, m, r, nu) + ddg(a, nu, r, m) - ddg(a, r, m, nu);
        }
      }
    }
  }
  // d_a g^{lr} = -g^{ls} d_a g_{st} g^{tr}
  std::vector<Eigen::MatrixXd> dgi(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    Eigen::MatrixXd d(n, n);
    for (int s = 0; s < n; ++s) {
      for (int t = 0; t < n; ++t) d(s, t) = dg(a, s, t);
    }
    dgi[static_cast<std::size_t>(a)] = -gi * d * gi;
  }

  LinearConnectionValue out{Tensor3(n), Tensor4(n)};
  for (int m = 0; m < n; ++m) {
    for (int l = 0; l < n; ++l) {
      for (int nu = 0; nu < n; ++nu) {
        double s = 0.0;
        for (int r = 0; r < n; ++r) s += gi(l, r) * lowered(r, m, nu);
        out.k(m, l, nu) = -0.5 * s;
        for (int a = 0; a < n; ++a) {
          double ds = 0.0;
          for (int r = 0; r < n; ++r) {
            ds += dgi[static_cast<std::size_t>(a)](l, r) * lowered(r, m, nu) +
                  gi(l, r) * lowered_d(a, r, m, nu);
          }
          out.dk(a, m, l, nu) = -0.5 * ds;
        }
      }
    }
  }
  return out;
}

/// Evaluates a linear connection at base coordinates x.
inline LinearConnectionValue eval_linear(const LinearConnection& k, const std::vector<double>& x) {
  const int n = k.dim();
  if (static_cast<int>(x.size()) != n) {
    throw FieldError(FieldError::Kind::DimensionMismatch, "point does not match connection dimension");
  }
  const TangentPoint base{x, std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  LinearConnectionValue out{Tensor3(n), Tensor4(n)};
  if (k.levi_civita_metric()) out = eval_levi_civita(eval_metric(*k.levi_civita_metric(), base));
  if (!k.coefficients().empty()) {
    for (int l = 0; l < n; ++l) {
      for (int nu = 0; nu < n; ++nu) {
        for (int m = 0; m < n; ++m) {
          const Expression& e = k.coefficient(l, nu, m);
          if (e.is_zero_literal()) continue;
          const Jet2 j = eval_jet2(e, base);
          out.k(l, nu, m) += j.value();
          for (int a = 0; a < n; ++a) out.dk(a, l, nu, m) += j.gradient(a);
        }
      }
    }
  }
  return out;
}

/// General-form value of a connection at p; linear connections are
/// contracted with xdot on the fly, so fiber derivatives equal the linear
/// coefficients exactly.
inline GeneralConnectionValue eval_general(const ConnectionField& field, const TangentPoint& p) {
  const int n = field.dim();
  if (p.dim() != n || static_cast<int>(p.xdot.size()) != n) {
    throw FieldError(FieldError::Kind::DimensionMismatch, "point does not match connection dimension");
  }
  GeneralConnectionValue out{Eigen::MatrixXd::Zero(n, n), Tensor3(n), Tensor3(n)};

  auto from_linear = [&](const LinearConnection& lin) {
    const LinearConnectionValue v = eval_linear(lin, p.x);
    for (int l = 0; l < n; ++l) {
      for (int nu = 0; nu < n; ++nu) {
        double k = 0.0;
        for (int m = 0; m < n; ++m) {
          k += v.k(l, nu, m) * p.xdot[m];
          out.dv(l, nu, m) = v.k(l, nu, m);
        }
        out.k(l, nu) = k;
        for (int a = 0; a < n; ++a) {
          double d = 0.0;
          for (int m = 0; m < n; ++m) d += v.dk(a, l, nu, m) * p.xdot[m];
          out.dx(l, nu, a) = d;
        }
      }
    }
  };

  if (field.is_linear()) {
    from_linear(field.linear());
  } else if (!field.general().is_expressions()) {
    from_linear(field.general().promoted_from());
  } else {
    const GeneralConnection& k = field.general();
    for (int l = 0; l < n; ++l) {
      for (int nu = 0; nu < n; ++nu) {
        const Jet2 j = eval_jet2(k.component(l, nu), p);
        out.k(l, nu) = j.value();
        for (int a = 0; a < n; ++a) {
          out.dx(l, nu, a) = j.gradient(a);
          out.dv(l, nu, a) = j.gradient(n + a);
        }
      }
    }
  }
  return out;
}

}  // namespace tegeo
