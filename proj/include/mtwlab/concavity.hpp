#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "mtwlab/cost_models.hpp"
#include "mtwlab/exec.hpp"

namespace mtw {

/// Scalar function on a finite point set.
struct Potential {
  PointList points;
  std::vector<double> values;

  Potential() = default;
  Potential(PointList pts, std::vector<double> vals);
  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] static Potential zero(const PointList& pts) { return {pts, std::vector<double>(pts.size(), 0.0)}; }
};

/// Exact Lipschitz constant of a grid function: max pairwise |dv| / d.
[[nodiscard]] double lipschitz_constant(const GroundSpace& space, const Potential& f);

struct CTransformResult {
  Potential potential;
  std::vector<int> argmin;  // lowest index among minimizers
  std::vector<bool> tie;    // another minimizer within 1e-12
};

/// psi^c(x) = min_y c(x, y) - psi(y) over the points of psi.
[[nodiscard]] CTransformResult c_transform(const CostModel& model, const Potential& psi, const PointList& X,
                                           Exec exec = Exec::Parallel);
/// Transform in the other slot: phi^c(y) = min_x c(x, y) - phi(x).
[[nodiscard]] CTransformResult c_transform_back(const CostModel& model, const Potential& phi, const PointList& Y,
                                                Exec exec = Exec::Parallel);

/// Indices x in X with psi(z) - c(x,z) <= psi(y) - c(x,y) + tol for all z.
[[nodiscard]] std::vector<int> c_superdifferential(const CostModel& model, const Potential& psi, int y_index,
                                                   const PointList& X, double tol = 1e-9);

struct Triple {
  Vec x, y, z;
};

struct ConcavityCertificate {
  bool is_c_concave = false;
  double strong_constant_C = 0.0;
  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  std::optional<Triple> worst_triple;
  long long n_triples = 0;
  int n_admissible_pairs = 0;
  int n_empty_superdifferential = 0;  // points of psi with no x in X attached
};

/// Brute-force best C in psi(z) - c(x,z) <= psi(y) - c(x,y) - C d(y,z)^2 over triples with
/// x in the c-superdifferential of y (tolerance tol) and (x,y), (x,z) in D_eps.
[[nodiscard]] ConcavityCertificate certify_strong_c_concavity(const CostModel& model, const Potential& psi,
                                                              double eps, const PointList& X, double tol = 1e-9,
                                                              Exec exec = Exec::Parallel);

using SmoothFunction = std::function<double(const Vec&)>;

/// Smallest eigenvalue of the tangent-frame Hessian of y -> c(x,y) - psi(y) at y, minimized over pairs.
[[nodiscard]] double check_differential_criterion(const CostModel& model, const SmoothFunction& psi,
                                                  const std::vector<std::pair<Vec, Vec>>& pairs,
                                                  double fd_step = 1e-3);

/// Tangent-frame Hessian of a grid function at point `index`, by weighted quadratic
/// least squares over the k nearest neighbors.
[[nodiscard]] Eigen::MatrixXd fit_local_hessian(const GroundSpace& space, const Potential& psi, int index,
                                                int k = 12);

/// Differential criterion for grid potentials; pairs are (x, index into psi).
[[nodiscard]] double check_differential_criterion_grid(const CostModel& model, const Potential& psi,
                                                       const std::vector<std::pair<Vec, int>>& pairs, int k = 12,
                                                       double fd_step = 1e-3);

struct ProofConstants {
  double C1 = 0.0;
  double C2 = 0.0;
};

/// Sampled infima of 1/sigma_max(D²xy c)^2 and ‖grad_x c(x,y) - grad_x c(x,z)‖² / d(y,z)² over D_eps.
[[nodiscard]] ProofConstants proof_constants(const CostModel& model, double eps, int n_samples, std::uint64_t seed,
                                             Exec exec = Exec::Parallel);

/// lambda * C1 * C2 * exp(-mtw_C).
[[nodiscard]] double modulus_constant(double lambda, double C1, double C2, double mtw_C);

struct MaxMarginPotential {
  Potential psi;     // on the target points
  Potential phi;     // on the source points, phi = psi^c along the assignment
  double margin = 0.0;  // min over x and z != T(x) of [c(x,z) - psi(z)] - [c(x,T x) - psi(T x)]
  bool acyclic = false;
};

/// Among all potentials on Y inducing the assignment x_i -> Y[assignment[i]], the one maximizing
/// the worst-case margin (minimum mean cycle of the exchange graph, then shortest paths).
/// Throws DomainError when the assignment is not the unique optimizer.
[[nodiscard]] MaxMarginPotential max_margin_potential(const CostModel& model, const PointList& X,
                                                      const PointList& Y, const std::vector<int>& assignment);

struct InducedMap {
  std::vector<int> index;
  std::vector<bool> tie;
};

/// T(x) = argmin_y c(x,y) - psi(y) over the points of psi.
[[nodiscard]] InducedMap induced_map(const CostModel& model, const Potential& psi, const PointList& X,
                                     Exec exec = Exec::Parallel);

}  // namespace mtw
