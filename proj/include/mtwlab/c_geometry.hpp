#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mtwlab/cost_models.hpp"
#include "mtwlab/exec.hpp"

namespace mtw {

/// y_t = cexp_x((1 - t) p0 + t p1) with p_i = -grad_x c(x, y_i).
[[nodiscard]] Vec c_segment(const CostModel& model, const Vec& x, const Vec& y0, const Vec& y1, double t);

struct SegmentViolation {
  Vec x, y0, y1;
  double t = 0.0;
  double distance = 0.0;  // d(x, y_t)
};

struct ConvexityReport {
  std::vector<SegmentViolation> violations;
  int n_pairs = 0;
  int n_t = 0;
  // Reflector only: max |‖p0‖² - (4/‖x - y0‖² - 1)| over sampled pairs.
  double max_norm_identity_error = 0.0;
  // max over segments of max_t ‖p_t‖ - max(‖p0‖, ‖p1‖); <= 0 up to rounding.
  double max_norm_excess = 0.0;
};

/// Samples (x, y0, y1) with both pairs in D_eps and tests (x, y_t) in D_eps on a t-grid.
[[nodiscard]] ConvexityReport check_c_convexity(const CostModel& model, double eps, int n_pairs, int n_t,
                                                std::uint64_t seed, Exec exec = Exec::Parallel);

/// Samples a pair (x, y) in D_eps (uniform x, rejection on y).
[[nodiscard]] std::pair<Vec, Vec> sample_domain_pair(const CostModel& model, double eps, class Rng& rng);

/// MTW tensor S_c(x,y)(zeta, eta): zeta tangent at y, eta tangent at x, mapped to the
/// q-direction eta~ = -D²xy c(x,y) eta. Nested central differences with Richardson refinement.
[[nodiscard]] double mtw_tensor(const CostModel& model, const Vec& x, const Vec& y, const Vec& zeta,
                                const Vec& eta, double fd_step = 1e-2);

struct MtwSample {
  Vec x, y, zeta, eta_tilde;
  double value = 0.0;   // S for unit zeta and unit eta~
  double cosine = 0.0;  // <zeta, eta~> for the unit directions
};

struct MtwReport {
  double min_tensor_value = 0.0;
  std::optional<MtwSample> violating_pair;
  double mtw_constant_C = 0.0;
  int n_points = 0;
  int n_dirs = 0;
  int n_evaluated = 0;
  int n_skipped = 0;
  double noise_floor = 0.0;
};

inline constexpr double kMtwNoiseFloor = 1e-6;

/// Sampling-based (MTWw) certificate over D_eps with unit direction pairs.
[[nodiscard]] MtwReport verify_mtww(const CostModel& model, double eps, int n_points, int n_dirs,
                                    std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace mtw
