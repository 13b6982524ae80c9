#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mtwlab/linalg.hpp"

namespace mtw {

/// Point on S^{d-1}; normalized on construction.
class UnitVector {
 public:
  explicit UnitVector(const Vec& v);
  [[nodiscard]] const Vec& vec() const noexcept { return v_; }
  operator const Vec&() const noexcept { return v_; }  // NOLINT(google-explicit-constructor)

 private:
  Vec v_;
};

/// Tangent vector `vec` at `base`.
struct TangentVector {
  Vec base;
  Vec vec;
};

/// Either the unit sphere S^{d-1} in R^d or an axis-aligned box in R^d.
class GroundSpace {
 public:
  enum class Kind { Sphere, Box };

  [[nodiscard]] static GroundSpace sphere(int d);
  [[nodiscard]] static GroundSpace box(const Vec& lower, const Vec& upper);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_sphere() const noexcept { return kind_ == Kind::Sphere; }
  [[nodiscard]] int ambient_dim() const noexcept { return dim_; }
  [[nodiscard]] int tangent_dim() const noexcept { return is_sphere() ? dim_ - 1 : dim_; }
  [[nodiscard]] const Vec& lower() const noexcept { return lower_; }
  [[nodiscard]] const Vec& upper() const noexcept { return upper_; }
  // Geodesic diameter of the space.
  [[nodiscard]] double diameter() const;
  [[nodiscard]] bool contains(const Vec& x, double tol = 1e-9) const;

  friend bool operator==(const GroundSpace&, const GroundSpace&) = default;

 private:
  GroundSpace(Kind kind, int dim, Vec lower, Vec upper)
      : kind_(kind), dim_(dim), lower_(lower), upper_(upper) {}
  Kind kind_ = Kind::Sphere;
  int dim_ = 0;
  Vec lower_;
  Vec upper_;
};

[[nodiscard]] double geodesic_distance(const GroundSpace& space, const Vec& x, const Vec& y);

/// Exponential map: sphere geodesic from x with initial velocity v; x + v on a box.
[[nodiscard]] Vec exp_map(const GroundSpace& space, const Vec& x, const Vec& v);
/// Inverse of exp_map away from the cut locus.
[[nodiscard]] Vec log_map(const GroundSpace& space, const Vec& x, const Vec& y);
/// Projection of an ambient vector onto T_x.
[[nodiscard]] Vec project_tangent(const GroundSpace& space, const Vec& x, const Vec& v);

/// Orthonormal basis of the tangent space at x. For spheres: Gram-Schmidt over the
/// canonical basis, ordered by increasing |x_k| (ties by index). Boxes: canonical basis.
[[nodiscard]] std::vector<Vec> tangent_frame(const GroundSpace& space, const Vec& x);
[[nodiscard]] std::vector<Vec> tangent_frame(const UnitVector& x);

/// Frame coordinates of a tangent vector and back.
[[nodiscard]] Eigen::VectorXd to_frame(const std::vector<Vec>& frame, const Vec& v);
[[nodiscard]] Vec from_frame(const std::vector<Vec>& frame, const Eigen::VectorXd& a);

/// Spherical Fibonacci lattice on S^2.
[[nodiscard]] PointList fibonacci_grid(int d, int n);
/// Seeded i.i.d. uniform points: normalized Gaussians on spheres, uniform in boxes.
[[nodiscard]] PointList uniform_sample(const GroundSpace& space, int n, std::uint64_t seed);
/// Uniform random unit tangent vector at x.
[[nodiscard]] Vec random_unit_tangent(const GroundSpace& space, const Vec& x, class Rng& rng);
/// Haar-random rotation matrix of size d (QR of a Gaussian matrix with sign fix).
[[nodiscard]] Eigen::MatrixXd random_rotation(int d, std::uint64_t seed);
/// Rotation by `angle` in the plane of coordinates (i, j).
[[nodiscard]] Eigen::MatrixXd plane_rotation(int d, int i, int j, double angle);
[[nodiscard]] Vec apply(const Eigen::MatrixXd& m, const Vec& x);
[[nodiscard]] PointList apply(const Eigen::MatrixXd& m, const PointList& pts);

}  // namespace mtw
