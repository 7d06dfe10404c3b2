#pragma once

// Pointwise forms and multivectors on TE.
//
// Basis order over the 2n directions is (base block, fiber block):
// index a < n is d^a (resp. the coordinate vector field of x^a), index n + a
// is the fiber counterpart. Storage carries no 1/r! weights: the array holds
// phi(e_I, e_J, ...), so a wedge monomial c d^I ^ d^J adds +c at (I, J) and
// -c at (J, I). The 1/r! weights live in the contractions.

#include <array>
#include <cassert>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "tegeo/point.hpp"
#include "tegeo/tensor.hpp"

namespace tegeo {

namespace detail {

struct Permutation {
  std::array<int, 3> order;
  int sign;
};

inline std::vector<Permutation> permutations(int degree) {
  switch (degree) {
    case 1: return {{{0, 0, 0}, 1}};
    case 2: return {{{0, 1, 0}, 1}, {{1, 0, 0}, -1}};
    case 3:
      return {{{0, 1, 2}, 1},  {{1, 2, 0}, 1},  {{2, 0, 1}, 1},
              {{1, 0, 2}, -1}, {{0, 2, 1}, -1}, {{2, 1, 0}, -1}};
    default: throw std::invalid_argument("alternating arrays support degrees 1..3");
  }
}

inline int factorial(int r) { return r <= 1 ? 1 : r * factorial(r - 1); }

}  // namespace detail

struct FormTag {};
struct MultivectorTag {};

/// Fully antisymmetric rank-r coefficient array over the 2n-dimensional
/// basis of T*TE (forms) or TTE (multivectors) at a base point.
template <class Tag>
class Alternating {
 public:
  Alternating(int degree, TangentPoint base, int unit_power = 0)
      : degree_(degree),
        extent_(2 * base.dim()),
        base_(std::move(base)),
        unit_power_(unit_power),
        data_(storage_size(degree, extent_), 0.0) {
    if (degree < 1 || degree > 3) throw std::invalid_argument("degree must be 1, 2 or 3");
  }

  int degree() const { return degree_; }
  int extent() const { return extent_; }
  int base_dim() const { return extent_ / 2; }
  const TangentPoint& base_point() const { return base_; }
  int unit_power() const { return unit_power_; }

  double operator()(int i) const { return data_[offset({i, 0, 0}, 1)]; }
  double operator()(int i, int j) const { return data_[offset({i, j, 0}, 2)]; }
  double operator()(int i, int j, int k) const { return data_[offset({i, j, k}, 3)]; }
  double at(const std::array<int, 3>& idx) const { return data_[offset(idx, degree_)]; }

  /// Adds c d^{I0} ^ ... ^ d^{I(r-1)}. Monomials with a repeated index vanish.
  void add_monomial(const std::array<int, 3>& idx, double c) {
    if (c == 0.0) return;
    for (int a = 0; a < degree_; ++a) {
      for (int b = a + 1; b < degree_; ++b) {
        if (idx[a] == idx[b]) return;
      }
    }
    for (const auto& perm : detail::permutations(degree_)) {
      std::array<int, 3> p{0, 0, 0};
      for (int s = 0; s < degree_; ++s) p[s] = idx[perm.order[s]];
      if (perm.sign > 0) {
        data_[offset(p, degree_)] += c;
      } else {
        data_[offset(p, degree_)] -= c;
      }
    }
  }

  std::span<const double> data() const { return data_; }

  /// Raw storage; writers must keep the array antisymmetric.
  std::span<double> raw() { return data_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Degree-2 arrays as a 2n x 2n matrix.
  template <class Matrix>
  Matrix as_matrix() const {
    assert(degree_ == 2);
    Matrix m(extent_, extent_);
    for (int i = 0; i < extent_; ++i) {
      for (int j = 0; j < extent_; ++j) m(i, j) = (*this)(i, j);
    }
    return m;
  }

  /// Calls f(idx) for every index tuple of the storage.
  template <class F>
  void for_each_index(F&& f) const {
    std::array<int, 3> idx{0, 0, 0};
    const int e = extent_;
    for (idx[0] = 0; idx[0] < e; ++idx[0]) {
      if (degree_ == 1) {
        f(idx);
        continue;
      }
      for (idx[1] = 0; idx[1] < e; ++idx[1]) {
        if (degree_ == 2) {
          f(idx);
          continue;
        }
        for (idx[2] = 0; idx[2] < e; ++idx[2]) f(idx);
      }
    }
  }

 private:
  static std::size_t storage_size(int degree, int extent) {
    std::size_t s = 1;
    for (int r = 0; r < degree; ++r) s *= static_cast<std::size_t>(extent);
    return s;
  }
  std::size_t offset(const std::array<int, 3>& idx, int degree) const {
    assert(degree == degree_);
    std::size_t off = 0;
    for (int r = 0; r < degree; ++r) {
      assert(idx[r] >= 0 && idx[r] < extent_);
      off = off * static_cast<std::size_t>(extent_) + static_cast<std::size_t>(idx[r]);
    }
    return off;
  }

  int degree_;
  int extent_;
  TangentPoint base_;
  int unit_power_;
  std::vector<double> data_;
};

using FormOnTE = Alternating<FormTag>;
using MultivectorOnTE = Alternating<MultivectorTag>;

/// Projection onto the antisymmetric part, (1/r!) sum over signed
/// permutations. Written as x0 + sum (xk - x0) / r! so that an already
/// antisymmetric input is returned bit for bit.
template <class Tag>
Alternating<Tag> antisymmetrize(const Alternating<Tag>& a) {
  Alternating<Tag> out(a.degree(), a.base_point(), a.unit_power());
  const auto perms = detail::permutations(a.degree());
  const double weight = detail::factorial(a.degree());
  auto out_raw = out.raw();
  std::size_t pos = 0;
  a.for_each_index([&](const std::array<int, 3>& idx) {
    auto term = [&](const detail::Permutation& perm) {
      std::array<int, 3> p{0, 0, 0};
      for (int s = 0; s < a.degree(); ++s) p[s] = idx[perm.order[s]];
      return perm.sign * a.at(p);
    };
    const double x0 = term(perms[0]);
    double spread = 0.0;
    for (std::size_t k = 1; k < perms.size(); ++k) spread += term(perms[k]) - x0;
    out_raw[pos++] = x0 + spread / weight;
  });
  return out;
}

class ContractionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Full pairing (1/r!) P^{I..} phi_{I..} of a multivector with a form of
/// the same degree. With r = 2 this is the interior product i(P) phi.
inline double contract(const MultivectorOnTE& p, const FormOnTE& phi) {
  if (!(p.base_point() == phi.base_point())) {
    throw ContractionError("contraction of objects at different base points");
  }
  if (p.degree() != phi.degree()) throw ContractionError("contraction of mismatched degrees");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.data().size(); ++i) sum += p.data()[i] * phi.data()[i];
  return sum / detail::factorial(p.degree());
}

/// Interior product of a bivector into a form of degree r >= 2:
/// (i(P) phi)_{C..} = 1/2 P^{AB} phi_{AB C..}.
inline std::vector<double> interior_bivector(const MultivectorOnTE& p, const FormOnTE& phi) {
  assert(p.degree() == 2 && phi.degree() == 3);
  const int e = p.extent();
  std::vector<double> out(static_cast<std::size_t>(e), 0.0);
  for (int c = 0; c < e; ++c) {
    double s = 0.0;
    for (int a = 0; a < e; ++a) {
      for (int b = 0; b < e; ++b) s += p(a, b) * phi(a, b, c);
    }
    out[static_cast<std::size_t>(c)] = 0.5 * s;
  }
  return out;
}

/// Assembles d(phi) from the gradients of its stored coefficients:
/// (d phi)_{J I1..Ir} = sum_k (-1)^k d_{I_k} phi_{I_0 .. ^I_k .. I_r}.
/// `gradient(idx, a)` returns the derivative of phi_idx along basis direction a.
template <class Gradient>
FormOnTE exterior_derivative(int degree, const TangentPoint& base, int unit_power,
                             Gradient&& gradient) {
  FormOnTE out(degree + 1, base, unit_power);
  auto raw = out.raw();
  std::size_t pos = 0;
  out.for_each_index([&](const std::array<int, 3>& idx) {
    double s = 0.0;
    for (int k = 0; k <= degree; ++k) {
      std::array<int, 3> rest{0, 0, 0};
      int r = 0;
      for (int m = 0; m <= degree; ++m) {
        if (m != k) rest[r++] = idx[m];
      }
      const double term = gradient(rest, idx[k]);
      s += (k % 2 == 0) ? term : -term;
    }
    raw[pos++] = s;
  });
  return out;
}

/// d(phi) where phi is sampled as a function of the 2n coordinates of TE;
/// gradients by central differences with the given step.
inline FormOnTE exterior_derivative_fd(
    int degree, const TangentPoint& base, int unit_power,
    const std::function<FormOnTE(const TangentPoint&)>& field, double step) {
  const int n = base.dim();
  std::vector<FormOnTE> plus, minus;
  plus.reserve(2 * n);
  minus.reserve(2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    TangentPoint up = base, down = base;
    auto& coord_up = a < n ? up.x[a] : up.xdot[a - n];
    auto& coord_down = a < n ? down.x[a] : down.xdot[a - n];
    coord_up += step;
    coord_down -= step;
    plus.push_back(field(up));
    minus.push_back(field(down));
  }
  return exterior_derivative(degree, base, unit_power, [&](const std::array<int, 3>& idx, int a) {
    return (plus[a].at(idx) - minus[a].at(idx)) / (2.0 * step);
  });
}

}  // namespace tegeo
