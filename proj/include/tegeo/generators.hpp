#pragma once

// Seeded generators of random fields for property tests and fuzzing, and
// the construction of torsion-free connections with a prescribed symmetric
// covariant derivative of the metric.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "tegeo/fields.hpp"

namespace tegeo {

/// Uniform double in [lo, hi) from the top 53 bits of the engine output,
/// so sequences are identical across standard library implementations.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

/// Polynomial of degree <= 2 in the base coordinates with coefficients
/// drawn uniformly from [-1, 1].
inline Expression random_quadratic(std::mt19937_64& rng, int n) {
  Expression sum(uniform(rng, -1.0, 1.0), n);
  for (int i = 0; i < n; ++i) {
    sum = sum + Expression(uniform(rng, -1.0, 1.0), n) * Expression::coordinate(i, n);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      sum = sum + Expression(uniform(rng, -1.0, 1.0), n) * Expression::coordinate(i, n) *
                      Expression::coordinate(j, n);
    }
  }
  return sum;
}

/// Shape of a random linear connection relative to the metric.
enum class LinearFamily {
  /// Unrelated polynomial coefficients.
  Generic,
  /// Levi-Civita plus g^{s mu} B_{l mu r} with B symmetric in (l, mu):
  /// keeps d_K g = 0 while carrying torsion in general.
  Compatible,
  /// Levi-Civita plus g^{s mu} C_{l mu r} with C symmetric in (l, r) only:
  /// torsion free with a non-symmetric nabla g.
  TorsionFree,
  /// Levi-Civita plus g^{s mu} S_{l mu r} with S fully symmetric:
  /// torsion free with a symmetric nabla g.
  SymmetricNabla,
};

namespace detail {

inline std::size_t flat3(int n, int a, int b, int c) {
  return static_cast<std::size_t>((a * n + b) * n + c);
}

/// Random lowered array B_{l mu r} with the symmetry required by the family.
inline std::vector<Expression> random_lowered(std::mt19937_64& rng, int n, LinearFamily family) {
  std::vector<Expression> b(static_cast<std::size_t>(n * n * n), Expression(0.0, n));
  std::vector<bool> set(b.size(), false);
  for (int l = 0; l < n; ++l) {
    for (int mu = 0; mu < n; ++mu) {
      for (int r = 0; r < n; ++r) {
        if (set[flat3(n, l, mu, r)]) continue;
        const Expression e = random_quadratic(rng, n);
        std::vector<std::array<int, 3>> orbit{{l, mu, r}};
        if (family == LinearFamily::Compatible) orbit.push_back({mu, l, r});
        if (family == LinearFamily::TorsionFree) orbit.push_back({r, mu, l});
        if (family == LinearFamily::SymmetricNabla) {
          orbit = {{l, mu, r}, {mu, l, r}, {r, mu, l}, {l, r, mu}, {mu, r, l}, {r, l, mu}};
        }
        for (const auto& o : orbit) {
          b[flat3(n, o[0], o[1], o[2])] = e;
          set[flat3(n, o[0], o[1], o[2])] = true;
        }
      }
    }
  }
  return b;
}

}  // namespace detail

/// Raises the middle slot of B_{l mu r} with the inverse of a diagonal
/// metric: A_l^s_r = B_{l s r} / g_{ss}.
inline std::vector<Expression> raise_middle_diagonal(const MetricField& g, const std::vector<Expression>& b) {
  const int n = g.dim();
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      if (l != m && !g.component(l, m).is_zero_literal()) {
        throw FieldError(FieldError::Kind::InvalidMetric, "raising requires a diagonal metric");
      }
    }
  }
  const TangentPoint origin{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<Expression> a(b.size(), Expression(0.0, n));
  for (int l = 0; l < n; ++l) {
    for (int s = 0; s < n; ++s) {
      for (int r = 0; r < n; ++r) {
        const Expression& g_ss = g.component(s, s);
        const Expression& v = b[detail::flat3(n, l, s, r)];
        if (g_ss.is_constant()) {
          const double c = eval_value(g_ss, origin);
          a[detail::flat3(n, l, s, r)] = c == 1.0 ? v : Expression(1.0 / c, n) * v;
        } else {
          a[detail::flat3(n, l, s, r)] = v / g_ss;
        }
      }
    }
  }
  return a;
}

/// Random linear connection of the given family. Families other than
/// Generic are built over the Levi-Civita connection of g, which must be
/// diagonal.
inline LinearConnection random_linear_connection(std::mt19937_64& rng, const MetricField& g,
                                                 LinearFamily family) {
  const int n = g.dim();
  std::vector<Expression> lowered = detail::random_lowered(rng, n, family);
  if (family == LinearFamily::Generic) return {n, std::move(lowered)};
  return {g, raise_middle_diagonal(g, lowered)};
}

/// Solves g_{s mu} A_l^s_r + g_{r s} A_l^s_mu = S_{l r mu} for A symmetric
/// in (l, r), given a fully symmetric S and the metric value at a point.
/// Adding A to the Levi-Civita coefficients yields nabla g = S. Result is
/// indexed (l, s, r).
inline Tensor3 symmetric_nabla_offset(const Eigen::MatrixXd& g, const Tensor3& s) {
  const int n = static_cast<int>(g.rows());
  // Unknowns A(l, s, r) with l <= r; equations for every (l, r <= mu).
  std::vector<std::array<int, 3>> unknowns;
  for (int l = 0; l < n; ++l) {
    for (int sg = 0; sg < n; ++sg) {
      for (int r = l; r < n; ++r) unknowns.push_back({l, sg, r});
    }
  }
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n * n * n), -1);
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    const auto [l, sg, r] = unknowns[i];
    slot[detail::flat3(n, l, sg, r)] = static_cast<Eigen::Index>(i);
    slot[detail::flat3(n, r, sg, l)] = static_cast<Eigen::Index>(i);
  }
  auto unknown_index = [&](int l, int sg, int r) { return slot[detail::flat3(n, l, sg, r)]; };
  std::vector<std::array<int, 3>> equations;
  for (int l = 0; l < n; ++l) {
    for (int r = 0; r < n; ++r) {
      for (int mu = r; mu < n; ++mu) equations.push_back({l, r, mu});
    }
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(equations.size()),
                                            static_cast<Eigen::Index>(unknowns.size()));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(equations.size()));
  for (std::size_t e = 0; e < equations.size(); ++e) {
    const auto [l, r, mu] = equations[e];
    const auto row = static_cast<Eigen::Index>(e);
    for (int sg = 0; sg < n; ++sg) {
      m(row, unknown_index(l, sg, r)) += g(sg, mu);
      m(row, unknown_index(l, sg, mu)) += g(r, sg);
    }
    rhs(row) = s(l, r, mu);
  }
  const Eigen::VectorXd sol = m.colPivHouseholderQr().solve(rhs);
  Tensor3 a(n);
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    const auto [l, sg, r] = unknowns[i];
    a(l, sg, r) = sol(static_cast<Eigen::Index>(i));
    a(r, sg, l) = sol(static_cast<Eigen::Index>(i));
  }
  return a;
}

}  // namespace tegeo
