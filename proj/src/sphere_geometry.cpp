#include "mtwlab/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mtwlab/rng.hpp"

namespace mtw {

UnitVector::UnitVector(const Vec& v) : v_(normalized(v)) {
  if (v.dim() < 2) throw ConfigError("UnitVector: dimension must be >= 2");
}

GroundSpace GroundSpace::sphere(int d) {
  if (d < 2 || d > kMaxDim) throw ConfigError("sphere: dimension must be in [2, 8]");
  return {Kind::Sphere, d, Vec(d), Vec(d)};
}

GroundSpace GroundSpace::box(const Vec& lower, const Vec& upper) {
  if (lower.dim() != upper.dim()) throw ConfigError("box: corner dimension mismatch");
  for (int i = 0; i < lower.dim(); ++i)
    if (!(lower[i] < upper[i])) throw ConfigError("box: lower corner must be < upper corner");
  return {Kind::Box, lower.dim(), lower, upper};
}

double GroundSpace::diameter() const {
  if (is_sphere()) return std::numbers::pi;
  return norm(upper_ - lower_);
}

bool GroundSpace::contains(const Vec& x, double tol) const {
  if (x.dim() != dim_) return false;
  if (is_sphere()) return std::abs(norm(x) - 1.0) <= tol;
  for (int i = 0; i < dim_; ++i)
    if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  return true;
}

double geodesic_distance(const GroundSpace& space, const Vec& x, const Vec& y) {
  if (x.dim() != space.ambient_dim() || y.dim() != space.ambient_dim())
    throw ConfigError("geodesic_distance: dimension mismatch");
  if (!space.is_sphere()) return norm(x - y);
  // Chord/half-angle form; accurate at both coincident and antipodal points.
  return 2.0 * std::atan2(norm(x - y), norm(x + y));
}

Vec exp_map(const GroundSpace& space, const Vec& x, const Vec& v) {
  if (!space.is_sphere()) return x + v;
  const double t = norm(v);
  if (t == 0.0) return x;
  Vec y = std::cos(t) * x + (std::sin(t) / t) * v;
  return y / norm(y);
}

Vec log_map(const GroundSpace& space, const Vec& x, const Vec& y) {
  if (!space.is_sphere()) return y - x;
  const double theta = geodesic_distance(space, x, y);
  Vec w = y - dot(x, y) * x;
  const double nw = norm(w);
  if (nw == 0.0) return Vec(x.dim());
  return (theta / nw) * w;
}

Vec project_tangent(const GroundSpace& space, const Vec& x, const Vec& v) {
  if (!space.is_sphere()) return v;
  return v - dot(x, v) * x;
}

std::vector<Vec> tangent_frame(const GroundSpace& space, const Vec& x) {
  const int d = space.ambient_dim();
  std::vector<Vec> frame;
  if (!space.is_sphere()) {
    for (int k = 0; k < d; ++k) frame.push_back(Vec::unit(d, k));
    return frame;
  }
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(x[a]) < std::abs(x[b]); });
  std::vector<Vec> basis{x};
  for (int k : order) {
    if (static_cast<int>(frame.size()) == d - 1) break;
    Vec v = Vec::unit(d, k);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) v -= dot(v, b) * b;
    const double n = norm(v);
    if (n < 1e-6) continue;
    v /= n;
    basis.push_back(v);
    frame.push_back(v);
  }
  return frame;
}

std::vector<Vec> tangent_frame(const UnitVector& x) {
  return tangent_frame(GroundSpace::sphere(x.vec().dim()), x.vec());
}

Eigen::VectorXd to_frame(const std::vector<Vec>& frame, const Vec& v) {
  Eigen::VectorXd a(static_cast<Eigen::Index>(frame.size()));
  for (std::size_t i = 0; i < frame.size(); ++i) a[static_cast<Eigen::Index>(i)] = dot(frame[i], v);
  return a;
}

Vec from_frame(const std::vector<Vec>& frame, const Eigen::VectorXd& a) {
  Vec v(frame.front().dim());
  for (std::size_t i = 0; i < frame.size(); ++i) v += a[static_cast<Eigen::Index>(i)] * frame[i];
  return v;
}

PointList fibonacci_grid(int d, int n) {
  if (d != 3) throw ConfigError("fibonacci_grid: only d = 3 is supported");
  if (n < 1) throw ConfigError("fibonacci_grid: n must be >= 1");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  PointList pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    pts.push_back(normalized(Vec{r * std::cos(phi), r * std::sin(phi), z}));
  }
  return pts;
}

PointList uniform_sample(const GroundSpace& space, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("uniform_sample: n must be >= 1");
  const int d = space.ambient_dim();
  Rng rng(seed);
  PointList pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec v(d);
    if (space.is_sphere()) {
      double nv = 0.0;
      while (nv < 1e-12) {
        for (int k = 0; k < d; ++k) v[k] = rng.normal();
        nv = norm(v);
      }
      v /= nv;
    } else {
      for (int k = 0; k < d; ++k) v[k] = rng.uniform(space.lower()[k], space.upper()[k]);
    }
    pts.push_back(v);
  }
  return pts;
}

Vec random_unit_tangent(const GroundSpace& space, const Vec& x, Rng& rng) {
  const int d = space.ambient_dim();
  for (;;) {
    Vec v(d);
    for (int k = 0; k < d; ++k) v[k] = rng.normal();
    v = project_tangent(space, x, v);
    const double n = norm(v);
    if (n > 1e-8) return v / n;
  }
}

Eigen::MatrixXd random_rotation(int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

Eigen::MatrixXd plane_rotation(int d, int i, int j, double angle) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
  m(i, i) = std::cos(angle);
  m(j, j) = std::cos(angle);
  m(i, j) = -std::sin(angle);
  m(j, i) = std::sin(angle);
  return m;
}

Vec apply(const Eigen::MatrixXd& m, const Vec& x) {
  Vec y(x.dim());
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) y[i] += m(i, j) * x[j];
  return y;
}

PointList apply(const Eigen::MatrixXd& m, const PointList& pts) {
  PointList out;
  out.reserve(pts.size());
  for (const Vec& p : pts) out.push_back(apply(m, p));
  return out;
}

}  // namespace mtw
