#pragma once

// Second-order forward-mode jets: value, gradient and Hessian carried
// through every arithmetic operation. Only the upper triangle of the
// Hessian is computed; the lower triangle is a mirror, so symmetry is exact.

#include <cassert>
#include <cmath>
#include <span>
#include <vector>

namespace tegeo {

class Jet2 {
 public:
  Jet2() = default;

  static Jet2 constant(double value, int nvars) {
    Jet2 j;
    j.value_ = value;
    j.grad_.assign(static_cast<std::size_t>(nvars), 0.0);
    j.hess_.assign(static_cast<std::size_t>(nvars) * nvars, 0.0);
    return j;
  }

  static Jet2 variable(double value, int index, int nvars) {
    assert(index >= 0 && index < nvars);
    Jet2 j = constant(value, nvars);
    j.grad_[static_cast<std::size_t>(index)] = 1.0;
    return j;
  }

  int nvars() const { return static_cast<int>(grad_.size()); }
  double value() const { return value_; }
  double gradient(int i) const { return grad_[static_cast<std::size_t>(i)]; }
  std::span<const double> gradient() const { return grad_; }
  double hessian(int i, int j) const {
    return hess_[static_cast<std::size_t>(i) * grad_.size() + static_cast<std::size_t>(j)];
  }

  Jet2 operator-() const {
    Jet2 r = *this;
    r.value_ = -r.value_;
    for (double& g : r.grad_) g = -g;
    for (double& h : r.hess_) h = -h;
    return r;
  }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    return combine(a, b, a.value_ + b.value_, [](double x, double y) { return x + y; });
  }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) {
    return combine(a, b, a.value_ - b.value_, [](double x, double y) { return x - y; });
  }

  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    const int n = a.nvars();
    Jet2 r = constant(a.value_ * b.value_, n);
    for (int i = 0; i < n; ++i) r.grad_[i] = a.grad_[i] * b.value_ + a.value_ * b.grad_[i];
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double h = a.hessian(i, j) * b.value_ + a.value_ * b.hessian(i, j) +
                         a.grad_[i] * b.grad_[j] + a.grad_[j] * b.grad_[i];
        r.set_hessian(i, j, h);
      }
    }
    return r;
  }

  // The caller guarantees b.value() != 0.
  friend Jet2 operator/(const Jet2& a, const Jet2& b) {
    const int n = a.nvars();
    const double q = a.value_ / b.value_;
    Jet2 r = constant(q, n);
    for (int i = 0; i < n; ++i) r.grad_[i] = (a.grad_[i] - q * b.grad_[i]) / b.value_;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double h = (a.hessian(i, j) - q * b.hessian(i, j) - b.grad_[i] * r.grad_[j] -
                          b.grad_[j] * r.grad_[i]) /
                         b.value_;
        r.set_hessian(i, j, h);
      }
    }
    return r;
  }

  Jet2& operator+=(const Jet2& b) { return *this = *this + b; }
  Jet2& operator-=(const Jet2& b) { return *this = *this - b; }
  Jet2& operator*=(const Jet2& b) { return *this = *this * b; }

  friend Jet2 operator*(double s, const Jet2& a) {
    Jet2 r = a;
    r.value_ *= s;
    for (double& g : r.grad_) g *= s;
    for (double& h : r.hess_) h *= s;
    return r;
  }

  /// Chain rule for a scalar function with first and second derivatives
  /// d1, d2 evaluated at value().
  Jet2 compose(double f, double d1, double d2) const {
    const int n = nvars();
    Jet2 r = constant(f, n);
    for (int i = 0; i < n; ++i) r.grad_[i] = d1 * grad_[i];
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        r.set_hessian(i, j, d1 * hessian(i, j) + d2 * grad_[i] * grad_[j]);
      }
    }
    return r;
  }

 private:
  template <class Op>
  static Jet2 combine(const Jet2& a, const Jet2& b, double value, Op op) {
    assert(a.nvars() == b.nvars());
    Jet2 r;
    r.value_ = value;
    r.grad_.resize(a.grad_.size());
    r.hess_.resize(a.hess_.size());
    for (std::size_t i = 0; i < a.grad_.size(); ++i) r.grad_[i] = op(a.grad_[i], b.grad_[i]);
    for (std::size_t i = 0; i < a.hess_.size(); ++i) r.hess_[i] = op(a.hess_[i], b.hess_[i]);
    return r;
  }

  void set_hessian(int i, int j, double h) {
    const std::size_t n = grad_.size();
    hess_[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] = h;
    hess_[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(i)] = h;
  }

  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

inline double value_of(double x) { return x; }
inline double value_of(const Jet2& x) { return x.value(); }

inline Jet2 sin(const Jet2& u) {
  const double s = std::sin(u.value());
  return u.compose(s, std::cos(u.value()), -s);
}
inline Jet2 cos(const Jet2& u) {
  const double c = std::cos(u.value());
  return u.compose(c, -std::sin(u.value()), -c);
}
inline Jet2 exp(const Jet2& u) {
  const double e = std::exp(u.value());
  return u.compose(e, e, e);
}
inline Jet2 log(const Jet2& u) {
  const double inv = 1.0 / u.value();
  return u.compose(std::log(u.value()), inv, -inv * inv);
}
inline Jet2 sqrt(const Jet2& u) {
  const double s = std::sqrt(u.value());
  return u.compose(s, 0.5 / s, -0.25 / (s * u.value()));
}
inline Jet2 abs(const Jet2& u) {
  const double sign = u.value() > 0.0 ? 1.0 : (u.value() < 0.0 ? -1.0 : 0.0);
  return u.compose(std::abs(u.value()), sign, 0.0);
}
inline Jet2 tanh(const Jet2& u) {
  const double t = std::tanh(u.value());
  const double d1 = 1.0 - t * t;
  return u.compose(t, d1, -2.0 * t * d1);
}
inline Jet2 pow(const Jet2& u, double c) {
  if (c == 0.0) return Jet2::constant(1.0, u.nvars());
  const double x = u.value();
  const double d1 = c * std::pow(x, c - 1.0);
  const double d2 = (c == 1.0) ? 0.0 : c * (c - 1.0) * std::pow(x, c - 2.0);
  return u.compose(std::pow(x, c), d1, d2);
}

}  // namespace tegeo
