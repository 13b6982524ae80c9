#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "mtwlab/sphere_geometry.hpp"

namespace mtw {

enum class CostKind { Reflector, Gauss, NegInner, Quadratic };

[[nodiscard]] std::string to_string(CostKind kind);
[[nodiscard]] CostKind parse_cost_kind(std::string_view name);

/// Real number or +infinity; +infinity is a tag, never stored as a float.
class ExtendedReal {
 public:
  [[nodiscard]] static constexpr ExtendedReal finite(double v) noexcept { return ExtendedReal(v, true); }
  [[nodiscard]] static constexpr ExtendedReal infinity() noexcept { return ExtendedReal(0.0, false); }

  [[nodiscard]] constexpr bool is_finite() const noexcept { return finite_; }
  [[nodiscard]] double value() const {
    if (!finite_) throw DomainError("ExtendedReal: value() of +infinity");
    return value_;
  }
  // Value or `fallback` when infinite.
  [[nodiscard]] constexpr double value_or(double fallback) const noexcept { return finite_ ? value_ : fallback; }

 private:
  constexpr ExtendedReal(double v, bool f) noexcept : value_(v), finite_(f) {}
  double value_;
  bool finite_;
};

/// Cost descriptor. `truncation` > 0 selects the truncated cost that is constant
/// outside the D_truncation domain (Lipschitz on the whole product space).
class CostModel {
 public:
  CostModel(CostKind kind, GroundSpace space, double truncation = 0.0);

  [[nodiscard]] static CostModel reflector(int d = 3) { return {CostKind::Reflector, GroundSpace::sphere(d)}; }
  [[nodiscard]] static CostModel gauss(int d = 3) { return {CostKind::Gauss, GroundSpace::sphere(d)}; }
  [[nodiscard]] static CostModel neg_inner(const GroundSpace& box) { return {CostKind::NegInner, box}; }
  [[nodiscard]] static CostModel quadratic(const GroundSpace& box) { return {CostKind::Quadratic, box}; }

  [[nodiscard]] CostKind kind() const noexcept { return kind_; }
  [[nodiscard]] const GroundSpace& space() const noexcept { return space_; }
  [[nodiscard]] double truncation() const noexcept { return truncation_; }
  [[nodiscard]] bool is_truncated() const noexcept { return truncation_ > 0.0; }
  [[nodiscard]] CostModel truncated(double eps) const { return {kind_, space_, eps}; }
  [[nodiscard]] CostModel untruncated() const { return {kind_, space_}; }

 private:
  CostKind kind_;
  GroundSpace space_;
  double truncation_;
};

[[nodiscard]] ExtendedReal cost(const CostModel& model, const Vec& x, const Vec& y);
// Throws DomainError when the cost is +infinity.
[[nodiscard]] double finite_cost(const CostModel& model, const Vec& x, const Vec& y);

/// Riemannian gradients (tangent at x, resp. y). Undefined on the +infinity set.
[[nodiscard]] Vec grad_x(const CostModel& model, const Vec& x, const Vec& y);
[[nodiscard]] Vec grad_y(const CostModel& model, const Vec& x, const Vec& y);

/// Mixed second derivative in tangent frames: rows index tangent_frame(x), columns tangent_frame(y).
[[nodiscard]] Eigen::MatrixXd cross_hessian(const CostModel& model, const Vec& x, const Vec& y,
                                            double step = 1e-4);

/// c-exponential at x: the inverse of y -> -grad_x c(x, y).
[[nodiscard]] Vec cexp(const CostModel& model, const Vec& x, const Vec& p);

/// Membership of (x, y) in D_eps; truncated models are defined on the whole product space.
[[nodiscard]] bool in_domain(const CostModel& model, const Vec& x, const Vec& y, double eps);

/// Reflector profile h(t) = -ln(1 - cos t) and its inverse on [-ln 2, inf).
struct HProfile {
  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double inverse(double v) const;
};
[[nodiscard]] HProfile h_profile(const CostModel& model);
[[nodiscard]] double reflector_h(double t);
[[nodiscard]] double reflector_h_inverse(double v);

/// Analytic Lipschitz constant of a truncated sphere cost for the product metric.
[[nodiscard]] double truncated_cost_lipschitz(const CostModel& model);

}  // namespace mtw
