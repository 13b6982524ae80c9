#pragma once

#include <cstdint>
#include <vector>

#include "mtwlab/concavity.hpp"
#include "mtwlab/ot_core.hpp"

namespace mtw {

struct Facet {
  Vec normal;     // outward unit normal
  double offset;  // <normal, x> <= offset on the body
  std::vector<int> vertices;
};

/// Polytope containing the origin in its interior, given by vertices (d = 2 or 3).
class ConvexBody {
 public:
  explicit ConvexBody(PointList vertices);

  [[nodiscard]] static ConvexBody cube(int d);
  /// Inscribed polytope of the unit ball: regular polygon (d = 2) or Fibonacci-vertex hull (d = 3)
  /// with roughly n_facets facets.
  [[nodiscard]] static ConvexBody ball(int d, int n_facets);
  /// Vertices at random directions with radii uniform in [r_min, 1].
  [[nodiscard]] static ConvexBody random_polytope(int d, int n_vertices, std::uint64_t seed, double r_min);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] const PointList& vertices() const noexcept { return vertices_; }
  [[nodiscard]] const std::vector<Facet>& facets() const noexcept { return facets_; }
  [[nodiscard]] ConvexBody transformed(const Eigen::MatrixXd& m) const;
  [[nodiscard]] ConvexBody scaled(double s) const;

  /// Largest r with B(0, r) inside K (the smallest facet offset).
  [[nodiscard]] double inradius() const;
  /// Smallest R with K inside B(0, R) (the largest vertex norm).
  [[nodiscard]] double circumradius() const;
  /// Max angular distance between a facet normal and the directions of its vertices.
  [[nodiscard]] double facet_resolution() const;

 private:
  int dim_;
  PointList vertices_;
  std::vector<Facet> facets_;
};

[[nodiscard]] double radial_function(const ConvexBody& K, const Vec& x);
[[nodiscard]] double support_function(const ConvexBody& K, const Vec& n);

struct GaussMapResult {
  Vec direction;  // v*/|v*|
  int vertex = -1;
  bool tie = false;
};
/// Direction of the vertex maximizing <n, v> (lowest index among ties, flagged).
[[nodiscard]] GaussMapResult gauss_map_inverse(const ConvexBody& K, const Vec& n);

/// Monte Carlo pushforward of the uniform sphere measure; atoms at the directions of vertices hit.
[[nodiscard]] DiscreteMeasure gauss_curvature_measure(const ConvexBody& K, int n_samples, std::uint64_t seed,
                                                      Exec exec = Exec::Parallel);
/// Exact pushforward of a point set (uniform weights) under gauss_map_inverse; `image[i]` is the atom of X[i].
struct GridPushforward {
  DiscreteMeasure measure;
  std::vector<int> image;
  int ties = 0;
};
[[nodiscard]] GridPushforward gauss_pushforward(const ConvexBody& K, const PointList& normals,
                                                Exec exec = Exec::Parallel);

struct DualPair {
  Potential phi;  // -ln h_K on normals
  Potential psi;  // ln rho_K on directions
};
[[nodiscard]] DualPair dual_potentials(const ConvexBody& K, const PointList& normals, const PointList& directions);

struct CapReport {
  int n_caps = 0;
  int violations = 0;
  double worst_margin = 0.0;  // min over caps of sigma(cap_{pi/2}) - mu(cap)
  Vec worst_center;
  double worst_radius = 0.0;
};
/// Aleksandrov condition mu(Theta) < sigma(Theta_{pi/2}) on random caps (S^2 only).
[[nodiscard]] CapReport verify_aleksandrov_caps(const DiscreteMeasure& mu, int n_caps, std::uint64_t seed);

/// argmin_y c(x,y) - psi(y) for the reflector cost.
[[nodiscard]] InducedMap reflector_map(const CostModel& model, const Potential& psi, const PointList& X);

/// Points P together with their antipodes -P (P from a Fibonacci grid of n/2 points).
[[nodiscard]] PointList antipodal_grid(int n);

}  // namespace mtw
