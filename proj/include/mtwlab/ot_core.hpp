#pragma once

#include <cstdint>
#include <vector>

#include "mtwlab/concavity.hpp"
#include "mtwlab/cost_models.hpp"
#include "mtwlab/exec.hpp"

namespace mtw {

/// Atoms with nonnegative weights summing to 1.
struct DiscreteMeasure {
  GroundSpace space;
  PointList points;
  std::vector<double> weights;

  DiscreteMeasure(GroundSpace sp, PointList pts, std::vector<double> w);
  [[nodiscard]] static DiscreteMeasure uniform(const GroundSpace& sp, PointList pts);
  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

struct PlanEntry {
  int i = 0;
  int j = 0;
  double mass = 0.0;
  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

/// Sparse coupling; entries sorted by (i, j).
struct TransportPlan {
  int rows = 0;
  int cols = 0;
  std::vector<PlanEntry> entries;

  [[nodiscard]] std::vector<double> row_sums() const;
  [[nodiscard]] std::vector<double> col_sums() const;
};

/// Dense cost table; forbidden (+infinity) arcs flagged, never stored as numbers.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> value;
  std::vector<char> finite;
  [[nodiscard]] double at(int i, int j) const { return value[static_cast<std::size_t>(i) * cols + j]; }
  [[nodiscard]] bool allowed(int i, int j) const { return finite[static_cast<std::size_t>(i) * cols + j] != 0; }
};

[[nodiscard]] CostMatrix cost_matrix(const CostModel& model, const PointList& X, const PointList& Y,
                                     Exec exec = Exec::Parallel);
/// Geodesic distance table.
[[nodiscard]] CostMatrix distance_matrix(const GroundSpace& space, const PointList& X, const PointList& Y,
                                         Exec exec = Exec::Parallel);

struct LpResult {
  TransportPlan plan;
  double value = 0.0;
  std::vector<double> u;  // source duals
  std::vector<double> v;  // target duals
  double duality_gap = 0.0;
};

/// Exact transportation LP over the allowed arcs of `c`; duals cleaned by a double
/// c-transform pass and normalized so v[0] = 0. Throws InfeasibleError with a Hall witness.
[[nodiscard]] LpResult solve_transport_lp(const CostMatrix& c, const std::vector<double>& a,
                                          const std::vector<double>& b);

struct SolveResult {
  TransportPlan plan;
  double primal_value = 0.0;
  Potential dual_phi;
  Potential dual_psi;
  double duality_gap = 0.0;
};

[[nodiscard]] SolveResult solve_discrete_ot(const CostModel& model, const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu);

[[nodiscard]] double wasserstein1(const GroundSpace& space, const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Row-wise single-valued support of a plan (mass > tol); throws if some row splits.
[[nodiscard]] std::vector<int> plan_to_map(const TransportPlan& plan, double tol = 1e-9);
/// Plan of the map x_i -> column T[i] with row masses `weights`.
[[nodiscard]] TransportPlan map_plan(const std::vector<double>& weights, const std::vector<int>& T, int cols);

/// Cost of gamma minus cost of the map T (gamma must have marginals mu and T#mu).
[[nodiscard]] double suboptimality_gap(const CostModel& model, const TransportPlan& gamma, const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu, const std::vector<int>& T);
/// Integral of d(T(x), y) against gamma.
[[nodiscard]] double plan_map_distance_w1(const TransportPlan& gamma, const std::vector<int>& T,
                                          const DiscreteMeasure& nu);

/// sup_x mu(B(x, beta)) over closed-ball candidate centers: atoms, and on S^2 / planar boxes also the
/// centers of radius-beta circles through pairs of atoms.
[[nodiscard]] double mass_concentration(const DiscreteMeasure& measure, double beta);

/// Plan supported on {d >= beta/2} by bipartite max-flow; requires M(beta) <= 1/2 for both measures.
[[nodiscard]] TransportPlan hall_feasible_plan(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double beta);

/// Exact Lipschitz constant of a grid potential.
[[nodiscard]] double lipschitz_estimate(const GroundSpace& space, const Potential& f);
/// Sampled Lipschitz constant of the cost on D_eps for the product metric (lower estimate).
[[nodiscard]] double lipschitz_estimate(const CostModel& model, double eps, int n, std::uint64_t seed);

/// Minimum geodesic distance over arcs carrying mass > 1e-12.
[[nodiscard]] double support_min_distance(const TransportPlan& gamma, const DiscreteMeasure& mu,
                                          const DiscreteMeasure& nu);

/// Reflector support-localization chain at concentration scale beta.
struct SupportBound {
  double beta = 0.0;
  double eps_pair = 0.0;  // h^{-1}(4 h(beta/2))
  double eps = 0.0;       // min(beta, eps_pair)
  double C_eps = 0.0;     // h(eps) + 2 h(eps/2) + 2 |c_min|
  double delta = 0.0;     // h^{-1}(C_eps)
};
[[nodiscard]] SupportBound support_bound_chain(double beta);

}  // namespace mtw
