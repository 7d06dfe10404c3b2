#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace tegeo {

/// Dense rank-R array, every index running over [0, extent). Row-major.
template <std::size_t Rank>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(int extent, double fill = 0.0)
      : extent_(extent), data_(size_for(extent), fill) {}

  static constexpr std::size_t rank() { return Rank; }
  int extent() const { return extent_; }

  template <class... I>
  double& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <class... I>
  double operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }

  double& at(const std::array<int, Rank>& idx) { return data_[offset(idx)]; }
  double at(const std::array<int, Rank>& idx) const { return data_[offset(idx)]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  Tensor& operator+=(const Tensor& o) {
    assert(o.extent_ == extent_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    assert(o.extent_ == extent_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }

 private:
  static std::size_t size_for(int extent) {
    std::size_t s = 1;
    for (std::size_t r = 0; r < Rank; ++r) s *= static_cast<std::size_t>(extent);
    return s;
  }
  std::size_t offset(const std::array<int, Rank>& idx) const {
    std::size_t off = 0;
    for (int i : idx) {
      assert(i >= 0 && i < extent_);
      off = off * static_cast<std::size_t>(extent_) + static_cast<std::size_t>(i);
    }
    return off;
  }

  int extent_ = 0;
  std::vector<double> data_;
};

using Tensor3 = Tensor<3>;
using Tensor4 = Tensor<4>;

/// A (0,3) tensor at a base point, e.g. the covariant derivative of the metric.
using Tensor03Value = Tensor3;

template <std::size_t Rank>
double max_abs_diff(const Tensor<Rank>& a, const Tensor<Rank>& b) {
  assert(a.extent() == b.extent());
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

}  // namespace tegeo
