#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtwlab/applications.hpp"
#include "mtwlab/report.hpp"

namespace mtw {

struct SweepConfig {
  CostKind model = CostKind::Reflector;
  double eps = 0.3;
  int n_source = 100;
  int n_target = 100;
  std::vector<double> perturbations{0.01, 0.02, 0.05, 0.1, 0.2};
  std::uint64_t seed = 1;
  std::string output;
  int n_instances = 1;  // independent instances (gap, support)
  int n_plans = 50;     // mixture plans per instance (gap)
  double beta = 0.4;    // concentration scale (support)
  int n_pairs = 500;    // point pairs (holder)
  bool binning = true;  // discretization row (target)

  /// Throws ConfigError on invalid values.
  void validate() const;
};

/// Target-measure stability: C d(T0,T1)^2 integrated against mu <= (Lip psi0 + Lip psi1) W1(nu0, nu1).
/// Rows: t = 0, each perturbation, and (optionally) the nearest-atom binning row labelled "binning".
[[nodiscard]] std::vector<BoundRow> run_target_stability(const SweepConfig& config);

/// Suboptimality-gap bounds on mixtures of the optimal plan with random permutation plans;
/// two rows per plan ("gap" and "gap_w1").
[[nodiscard]] std::vector<BoundRow> run_gap_bound(const SweepConfig& config);

/// Both-measure perturbation with the truncated cost: W1(gamma_T, gamma~) <= e + sqrt(2 Lip(c)/C e).
[[nodiscard]] std::vector<BoundRow> run_both_measures(const SweepConfig& config);

/// Least-squares slope of log(lhs) against log(constants[key]) over rows where both are positive.
[[nodiscard]] double loglog_slope(const std::vector<BoundRow>& rows, const std::string& key);

/// d(T x, T x')^2 <= (Lip(c) / C) d(x, x') for T induced by psi on random pairs of X.
[[nodiscard]] std::vector<BoundRow> run_holder_check(const CostModel& model, const Potential& psi, double C,
                                                     const PointList& X, int n_pairs, std::uint64_t seed);
/// Builds a certified truncated-cost instance from the config, then runs run_holder_check.
[[nodiscard]] std::vector<BoundRow> run_holder_experiment(const SweepConfig& config);

/// Reflector support localization on random measures with M(beta) < 1/8: rows "support",
/// "hall_distance" and "hall_cost" per instance.
[[nodiscard]] std::vector<BoundRow> run_support_localization(const SweepConfig& config);

struct NamedBody {
  std::string name;
  ConvexBody body;
};

struct GaussExperimentConfig {
  int n_grid = 2000;
  double r = 0.9;
  double R = 1.1;
  std::uint64_t seed = 1;
};

/// Gauss-curvature stability per body L: mean d(T_K, T_L)^2 <= (Lip psi_K + Lip psi_L)/C W1(mu_K, mu_L).
[[nodiscard]] std::vector<BoundRow> run_gauss_experiment(const ConvexBody& K0, const std::vector<NamedBody>& family,
                                                         const GaussExperimentConfig& config);
/// Fine ball polytope and five perturbed bodies in K(0.9, 1.1).
[[nodiscard]] std::pair<ConvexBody, std::vector<NamedBody>> default_gauss_family(std::uint64_t seed);

/// Brute-force strong c-concavity constant against the proof modulus for a smooth potential
/// psi(y) = a <v, y> with its exact induced map.
struct PipelineResult {
  double brute_C = 0.0;
  double lambda = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double mtw_C = 0.0;
  double modulus = 0.0;
  bool applicable = false;  // lambda > 0
  bool pass = false;        // brute_C >= modulus - 1e-6
};
[[nodiscard]] PipelineResult run_pipeline_soundness(CostKind kind, double eps, std::uint64_t seed,
                                                    int n_points = 150, double amplitude = 0.2);

/// Antipodal grid solved against itself and a rotated copy; the solver's potential fed back through
/// reflector_map must reproduce the plan map. Rows "antipodal" and "rotated".
[[nodiscard]] std::vector<BoundRow> run_reflector_synthesis(int n_grid, std::uint64_t seed);

}  // namespace mtw
