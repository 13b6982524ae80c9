#include "mtwlab/c_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mtwlab/rng.hpp"

namespace mtw {

Vec c_segment(const CostModel& model, const Vec& x, const Vec& y0, const Vec& y1, double t) {
  if (!cost(model, x, y0).is_finite() || !cost(model, x, y1).is_finite())
    throw DomainError("c_segment: endpoint outside the finiteness domain");
  const Vec p0 = -grad_x(model, x, y0);
  const Vec p1 = -grad_x(model, x, y1);
  return cexp(model, x, (1.0 - t) * p0 + t * p1);
}

std::pair<Vec, Vec> sample_domain_pair(const CostModel& model, double eps, Rng& rng) {
  const GroundSpace& sp = model.space();
  auto draw = [&] { return uniform_sample(sp, 1, rng.index(UINT64_MAX)).front(); };
  const Vec x = draw();
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Vec y = draw();
    if (in_domain(model, x, y, eps) && cost(model, x, y).is_finite()) return {x, y};
  }
  throw ConfigError("sample_domain_pair: D_eps appears empty for eps = " + std::to_string(eps));
}

namespace {

struct PairResult {
  std::vector<SegmentViolation> violations;
  double identity_error = 0.0;
  double norm_excess = -std::numeric_limits<double>::infinity();
};

PairResult convexity_pair(const CostModel& model, double eps, int n_t, std::uint64_t seed) {
  Rng rng(seed);
  const auto [x, y0] = sample_domain_pair(model, eps, rng);
  Vec y1 = y0;
  for (int attempt = 0;; ++attempt) {
    y1 = uniform_sample(model.space(), 1, rng.index(UINT64_MAX)).front();
    if (in_domain(model, x, y1, eps) && cost(model, x, y1).is_finite()) break;
    if (attempt > 100000) throw ConfigError("check_c_convexity: cannot sample y1");
  }
  PairResult r;
  const Vec p0 = -grad_x(model, x, y0);
  const Vec p1 = -grad_x(model, x, y1);
  if (model.kind() == CostKind::Reflector)
    r.identity_error = std::abs(squared_norm(p0) - (4.0 / squared_norm(x - y0) - 1.0));
  const double end_max = std::max(norm(p0), norm(p1));
  const double pi_half = std::acos(0.0);
  for (int k = 0; k < n_t; ++k) {
    const double t = n_t == 1 ? 0.0 : static_cast<double>(k) / (n_t - 1);
    const Vec pt = (1.0 - t) * p0 + t * p1;
    r.norm_excess = std::max(r.norm_excess, norm(pt) - end_max);
    const Vec yt = cexp(model, x, pt);
    const double d = geodesic_distance(model.space(), x, yt);
    bool ok = true;
    if (model.kind() == CostKind::Reflector) ok = d >= eps - 1e-9;
    if (model.kind() == CostKind::Gauss) ok = d <= pi_half - eps + 1e-9;
    if (!ok) r.violations.push_back({x, y0, y1, t, d});
  }
  return r;
}

}  // namespace

ConvexityReport check_c_convexity(const CostModel& model, double eps, int n_pairs, int n_t, std::uint64_t seed,
                                  Exec exec) {
  if (n_pairs < 1 || n_t < 1) throw ConfigError("check_c_convexity: counts must be positive");
  std::vector<PairResult> results(static_cast<std::size_t>(n_pairs));
  if (exec == Exec::Serial) {
    for (int i = 0; i < n_pairs; ++i) results[i] = convexity_pair(model, eps, n_t, mix_seed(seed, i));
  } else {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_pairs; ++i) results[i] = convexity_pair(model, eps, n_t, mix_seed(seed, i));
  }
  ConvexityReport rep;
  rep.n_pairs = n_pairs;
  rep.n_t = n_t;
  rep.max_norm_excess = -std::numeric_limits<double>::infinity();
  for (auto& r : results) {
    rep.violations.insert(rep.violations.end(), r.violations.begin(), r.violations.end());
    rep.max_norm_identity_error = std::max(rep.max_norm_identity_error, r.identity_error);
    rep.max_norm_excess = std::max(rep.max_norm_excess, r.norm_excess);
  }
  return rep;
}

namespace {

Vec geodesic_velocity(const GroundSpace& sp, const Vec& y, const Vec& unit_dir, double s) {
  if (!sp.is_sphere()) return unit_dir;
  return -std::sin(s) * y + std::cos(s) * unit_dir;
}

// d²/ds² c(cexp_y(q), exp_y(s zeta)) at s = 0, central difference of the analytic first derivative.
double inner_second(const CostModel& model, const Vec& y, const Vec& q, const Vec& zeta, double h) {
  const GroundSpace& sp = model.space();
  const Vec x = cexp(model, y, q);
  auto slope = [&](double s) {
    const Vec ys = exp_map(sp, y, s * zeta);
    if (!cost(model, x, ys).is_finite())
      throw DomainError("mtw_tensor: stencil left the finiteness domain at step " + std::to_string(s));
    return dot(grad_y(model, x, ys), geodesic_velocity(sp, y, zeta, s));
  };
  return (slope(h) - slope(-h)) / (2.0 * h);
}

double nested_difference(const CostModel& model, const Vec& y, const Vec& q0, const Vec& zeta, const Vec& eta,
                         double step) {
  const double h = step;
  const double k = step;
  const double gp = inner_second(model, y, q0 + k * eta, zeta, h);
  const double g0 = inner_second(model, y, q0, zeta, h);
  const double gm = inner_second(model, y, q0 - k * eta, zeta, h);
  return (gp - 2.0 * g0 + gm) / (k * k);
}

// Unit-direction tensor value and the q-direction; nullopt for degenerate directions.
std::optional<std::pair<double, Vec>> unit_tensor(const CostModel& model, const Vec& x, const Vec& y,
                                                  const Vec& zeta_unit, const Vec& eta, double fd_step) {
  const GroundSpace& sp = model.space();
  const Eigen::MatrixXd a = cross_hessian(model, x, y);
  const auto fx = tangent_frame(sp, x);
  const auto fy = tangent_frame(sp, y);
  const Vec eta_tilde = from_frame(fy, -(a.transpose() * to_frame(fx, eta)));
  const double ne = norm(eta_tilde);
  if (ne < 1e-8) return std::nullopt;
  const Vec eta_hat = eta_tilde / ne;
  const Vec q0 = -grad_y(model, x, y);
  const double coarse = nested_difference(model, y, q0, zeta_unit, eta_hat, fd_step);
  const double fine = nested_difference(model, y, q0, zeta_unit, eta_hat, 0.5 * fd_step);
  const double d2 = (4.0 * fine - coarse) / 3.0;
  return std::make_pair(-1.5 * d2, eta_tilde);
}

}  // namespace

double mtw_tensor(const CostModel& model, const Vec& x, const Vec& y, const Vec& zeta, const Vec& eta,
                  double fd_step) {
  if (!cost(model, x, y).is_finite()) throw DomainError("mtw_tensor: (x, y) outside the finiteness domain");
  const double nz = norm(zeta);
  if (nz < 1e-8) return 0.0;
  const auto r = unit_tensor(model, x, y, zeta / nz, eta, fd_step);
  if (!r) return 0.0;
  return r->first * nz * nz * squared_norm(r->second);
}

namespace {

struct PointSweep {
  std::vector<MtwSample> samples;
  int skipped = 0;
};

PointSweep mtw_point(const CostModel& model, double eps, int n_dirs, std::uint64_t seed) {
  Rng rng(seed);
  const auto [x, y] = sample_domain_pair(model, eps, rng);
  PointSweep out;
  for (int j = 0; j < n_dirs; ++j) {
    const Vec zeta = random_unit_tangent(model.space(), y, rng);
    const Vec eta = random_unit_tangent(model.space(), x, rng);
    const auto r = unit_tensor(model, x, y, zeta, eta, 1e-2);
    if (!r) {
      ++out.skipped;
      continue;
    }
    const Vec eta_hat = r->second / norm(r->second);
    out.samples.push_back({x, y, zeta, r->second, r->first, dot(zeta, eta_hat)});
  }
  return out;
}

}  // namespace

MtwReport verify_mtww(const CostModel& model, double eps, int n_points, int n_dirs, std::uint64_t seed,
                      Exec exec) {
  if (n_points < 1 || n_dirs < 1) throw ConfigError("verify_mtww: counts must be positive");
  std::vector<PointSweep> sweeps(static_cast<std::size_t>(n_points));
  if (exec == Exec::Serial) {
    for (int i = 0; i < n_points; ++i) sweeps[i] = mtw_point(model, eps, n_dirs, mix_seed(seed, i));
  } else {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_points; ++i) sweeps[i] = mtw_point(model, eps, n_dirs, mix_seed(seed, i));
  }
  MtwReport rep;
  rep.n_points = n_points;
  rep.n_dirs = n_dirs;
  rep.noise_floor = kMtwNoiseFloor;
  rep.min_tensor_value = std::numeric_limits<double>::infinity();
  for (const auto& sw : sweeps) {
    rep.n_skipped += sw.skipped;
    for (const auto& s : sw.samples) {
      ++rep.n_evaluated;
      if (s.value < rep.min_tensor_value) {
        rep.min_tensor_value = s.value;
        if (s.value < -kMtwNoiseFloor) rep.violating_pair = s;
      }
      if (s.value < -kMtwNoiseFloor) {
        const double denom = std::abs(s.cosine);
        const double needed = denom > 0.0 ? -s.value / denom : std::numeric_limits<double>::infinity();
        rep.mtw_constant_C = std::max(rep.mtw_constant_C, needed);
      }
    }
  }
  if (rep.n_evaluated == 0) rep.min_tensor_value = 0.0;
  return rep;
}

}  // namespace mtw
