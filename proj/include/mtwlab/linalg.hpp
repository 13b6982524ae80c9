#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <vector>

#include "mtwlab/error.hpp"

namespace mtw {

inline constexpr int kMaxDim = 8;

/// Small dense vector with inline storage; ambient coordinates of a point or tangent vector.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw ConfigError("Vec: dimension out of range");
  }
  Vec(std::initializer_list<double> init) : Vec(static_cast<int>(init.size())) {
    int i = 0;
    for (double v : init) c_[i++] = v;
  }
  explicit Vec(std::span<const double> init) : Vec(static_cast<int>(init.size())) {
    for (int i = 0; i < dim_; ++i) c_[i] = init[i];
  }

  [[nodiscard]] static Vec zeros(int dim) { return Vec(dim); }
  [[nodiscard]] static Vec unit(int dim, int k) {
    Vec v(dim);
    v[k] = 1.0;
    return v;
  }

  [[nodiscard]] int dim() const noexcept { return dim_; }
  double& operator[](int i) noexcept { return c_[i]; }
  double operator[](int i) const noexcept { return c_[i]; }
  [[nodiscard]] std::span<const double> coords() const noexcept {
    return {c_.data(), static_cast<std::size_t>(dim_)};
  }
  [[nodiscard]] std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + dim_}; }

  Vec& operator+=(const Vec& o) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(double s) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }
  Vec& operator/=(double s) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] /= s;
    return *this;
  }

  friend bool operator==(const Vec& a, const Vec& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline Vec operator+(Vec a, const Vec& b) noexcept { return a += b; }
inline Vec operator-(Vec a, const Vec& b) noexcept { return a -= b; }
inline Vec operator*(Vec a, double s) noexcept { return a *= s; }
inline Vec operator*(double s, Vec a) noexcept { return a *= s; }
inline Vec operator/(Vec a, double s) noexcept { return a /= s; }
inline Vec operator-(Vec a) noexcept { return a *= -1.0; }

[[nodiscard]] inline double dot(const Vec& a, const Vec& b) noexcept {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}
[[nodiscard]] inline double squared_norm(const Vec& a) noexcept { return dot(a, a); }
[[nodiscard]] inline double norm(const Vec& a) noexcept { return std::sqrt(dot(a, a)); }

[[nodiscard]] inline Vec normalized(const Vec& a) {
  const double n = norm(a);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("normalized: zero or non-finite vector");
  return a / n;
}

using PointList = std::vector<Vec>;

}  // namespace mtw
