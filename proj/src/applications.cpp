#include "mtwlab/applications.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <limits>
#include <utility>

#include "mtwlab/rng.hpp"

namespace mtw {

namespace {

std::vector<Facet> hull_2d(const PointList& pts) {
  std::vector<int> idx(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a][0] < pts[b][0] || (pts[a][0] == pts[b][0] && pts[a][1] < pts[b][1]);
  });
  auto cross = [&](int o, int a, int b) {
    return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) - (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]);
  };
  std::vector<int> h(2 * idx.size());
  std::size_t k = 0;
  for (int i : idx) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], i) <= 0) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lo = k + 1; t-- > 0;) {
    const int i = idx[t];
    while (k >= lo && cross(h[k - 2], h[k - 1], i) <= 0) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  if (h.size() < 3) throw ConfigError("ConvexBody: degenerate planar vertex set");
  std::vector<Facet> out;
  for (std::size_t e = 0; e < h.size(); ++e) {
    const Vec& a = pts[h[e]];
    const Vec& b = pts[h[(e + 1) % h.size()]];
    const Vec n = normalized(Vec{b[1] - a[1], a[0] - b[0]});
    out.push_back({n, dot(n, a), {h[e], h[(e + 1) % h.size()]}});
  }
  return out;
}

Vec cross3(const Vec& a, const Vec& b) {
  return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

std::vector<Facet> hull_3d(const PointList& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw ConfigError("ConvexBody: need at least 4 vertices in 3D");
  double scale = 0.0;
  for (const Vec& p : pts) scale = std::max(scale, norm(p));
  const double tol = 1e-10 * std::max(1.0, scale);
  int i0 = 0, i1 = 0, i2 = 0, i3 = 0;
  double best = -1.0;
  for (int i = 0; i < n; ++i)
    if (const double d = norm(pts[i] - pts[i0]); d > best) best = d, i1 = i;
  best = -1.0;
  for (int i = 0; i < n; ++i)
    if (const double d = norm(cross3(pts[i1] - pts[i0], pts[i] - pts[i0])); d > best) best = d, i2 = i;
  const Vec pn = cross3(pts[i1] - pts[i0], pts[i2] - pts[i0]);
  best = -1.0;
  for (int i = 0; i < n; ++i)
    if (const double d = std::abs(dot(pn, pts[i] - pts[i0])); d > best) best = d, i3 = i;
  if (best <= tol * tol) throw ConfigError("ConvexBody: vertices are coplanar");
  const Vec centroid = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);

  struct Face {
    std::array<int, 3> v;
    Vec n;
    bool alive;
  };
  std::vector<Face> faces;
  auto make = [&](int a, int b, int c) {
    Vec nn = cross3(pts[b] - pts[a], pts[c] - pts[a]);
    if (dot(nn, centroid - pts[a]) > 0) {
      std::swap(b, c);
      nn = -nn;
    }
    faces.push_back({{a, b, c}, normalized(nn), true});
  };
  auto make_oriented = [&](int a, int b, int c) {
    faces.push_back({{a, b, c}, normalized(cross3(pts[b] - pts[a], pts[c] - pts[a])), true});
  };
  make(i0, i1, i2);
  make(i0, i1, i3);
  make(i0, i2, i3);
  make(i1, i2, i3);
  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::set<std::pair<int, int>> edges;
    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!faces[f].alive) continue;
      if (dot(faces[f].n, pts[p] - pts[faces[f].v[0]]) > tol) visible.push_back(f);
    }
    if (visible.empty()) continue;
    for (std::size_t f : visible) {
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) edges.insert({v[k], v[(k + 1) % 3]});
      faces[f].alive = false;
    }
    for (const auto& [a, b] : edges)
      if (!edges.count({b, a})) make_oriented(a, b, p);
  }
  std::vector<Facet> out;
  for (const auto& f : faces)
    if (f.alive) out.push_back({f.n, dot(f.n, pts[f.v[0]]), {f.v[0], f.v[1], f.v[2]}});
  return out;
}

}  // namespace

ConvexBody::ConvexBody(PointList vertices) : dim_(0), vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw ConfigError("ConvexBody: no vertices");
  dim_ = vertices_.front().dim();
  if (dim_ != 2 && dim_ != 3) throw ConfigError("ConvexBody: only d = 2 and d = 3 are supported");
  for (const Vec& v : vertices_)
    if (v.dim() != dim_) throw ConfigError("ConvexBody: vertex dimension mismatch");
  facets_ = dim_ == 2 ? hull_2d(vertices_) : hull_3d(vertices_);
  for (const Facet& f : facets_)
    if (!(f.offset > 1e-9)) throw ConfigError("ConvexBody: origin is not strictly inside the hull");
}

ConvexBody ConvexBody::cube(int d) {
  PointList v;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec p(d);
    for (int k = 0; k < d; ++k) p[k] = (mask >> k) & 1 ? 1.0 : -1.0;
    v.push_back(p);
  }
  return ConvexBody(std::move(v));
}

ConvexBody ConvexBody::ball(int d, int n_facets) {
  if (d == 2) {
    PointList v;
    for (int k = 0; k < n_facets; ++k) {
      const double a = 2.0 * std::numbers::pi * k / n_facets;
      v.push_back(Vec{std::cos(a), std::sin(a)});
    }
    return ConvexBody(std::move(v));
  }
  if (d == 3) return ConvexBody(fibonacci_grid(3, std::max(4, n_facets / 2 + 2)));
  throw ConfigError("ConvexBody::ball: only d = 2 and d = 3 are supported");
}

ConvexBody ConvexBody::random_polytope(int d, int n_vertices, std::uint64_t seed, double r_min) {
  if (!(r_min > 0.0 && r_min <= 1.0)) throw ConfigError("random_polytope: r_min must be in (0, 1]");
  const PointList dirs = uniform_sample(GroundSpace::sphere(d), n_vertices, seed);
  Rng rng(mix_seed(seed, 0x5eed));
  PointList v;
  for (const Vec& u : dirs) v.push_back(rng.uniform(r_min, 1.0) * u);
  return ConvexBody(std::move(v));
}

ConvexBody ConvexBody::transformed(const Eigen::MatrixXd& m) const { return ConvexBody(apply(m, vertices_)); }

ConvexBody ConvexBody::scaled(double s) const {
  PointList v = vertices_;
  for (Vec& p : v) p *= s;
  return ConvexBody(std::move(v));
}

double ConvexBody::inradius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const Facet& f : facets_) r = std::min(r, f.offset);
  return r;
}

double ConvexBody::circumradius() const {
  double r = 0.0;
  for (const Vec& v : vertices_) r = std::max(r, norm(v));
  return r;
}

double ConvexBody::facet_resolution() const {
  const GroundSpace sp = GroundSpace::sphere(dim_);
  double r = 0.0;
  for (const Facet& f : facets_)
    for (int k : f.vertices) r = std::max(r, geodesic_distance(sp, f.normal, normalized(vertices_[k])));
  return r;
}

double radial_function(const ConvexBody& K, const Vec& x) {
  double r = std::numeric_limits<double>::infinity();
  for (const Facet& f : K.facets()) {
    const double s = dot(f.normal, x);
    if (s > 1e-15) r = std::min(r, f.offset / s);
  }
  return r;
}

double support_function(const ConvexBody& K, const Vec& n) {
  double h = -std::numeric_limits<double>::infinity();
  for (const Vec& v : K.vertices()) h = std::max(h, dot(n, v));
  return h;
}

GaussMapResult gauss_map_inverse(const ConvexBody& K, const Vec& n) {
  const PointList& V = K.vertices();
  int best = 0;
  double bv = dot(n, V[0]);
  for (std::size_t i = 1; i < V.size(); ++i) {
    const double s = dot(n, V[i]);
    if (s > bv) {
      bv = s;
      best = static_cast<int>(i);
    }
  }
  GaussMapResult r{normalized(V[best]), best, false};
  const double tol = 1e-12 * std::max(1.0, std::abs(bv));
  for (std::size_t i = 0; i < V.size(); ++i)
    if (static_cast<int>(i) != best && dot(n, V[i]) >= bv - tol) r.tie = true;
  return r;
}

namespace {

DiscreteMeasure atoms_from_counts(const ConvexBody& K, const std::vector<long>& counts, long total,
                                  std::vector<int>* atom_of_vertex) {
  PointList pts;
  std::vector<double> w;
  if (atom_of_vertex) atom_of_vertex->assign(counts.size(), -1);
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (counts[v] == 0) continue;
    if (atom_of_vertex) (*atom_of_vertex)[v] = static_cast<int>(pts.size());
    pts.push_back(normalized(K.vertices()[v]));
    w.push_back(static_cast<double>(counts[v]) / static_cast<double>(total));
  }
  return {GroundSpace::sphere(K.dim()), std::move(pts), std::move(w)};
}

}  // namespace

DiscreteMeasure gauss_curvature_measure(const ConvexBody& K, int n_samples, std::uint64_t seed, Exec exec) {
  if (n_samples < 1) throw ConfigError("gauss_curvature_measure: n_samples must be positive");
  std::vector<int> hit(static_cast<std::size_t>(n_samples));
  auto one = [&](int k) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
    Vec nrm(K.dim());
    double len = 0.0;
    while (len < 1e-12) {
      for (int c = 0; c < K.dim(); ++c) nrm[c] = rng.normal();
      len = norm(nrm);
    }
    hit[k] = gauss_map_inverse(K, nrm / len).vertex;
  };
  if (exec == Exec::Serial) {
    for (int k = 0; k < n_samples; ++k) one(k);
  } else {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n_samples; ++k) one(k);
  }
  std::vector<long> counts(K.vertices().size(), 0);
  for (int v : hit) ++counts[v];
  return atoms_from_counts(K, counts, n_samples, nullptr);
}

GridPushforward gauss_pushforward(const ConvexBody& K, const PointList& normals, Exec exec) {
  std::vector<GaussMapResult> res(normals.size());
  const auto n = static_cast<long>(normals.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) res[i] = gauss_map_inverse(K, normals[i]);
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) res[i] = gauss_map_inverse(K, normals[i]);
  }
  std::vector<long> counts(K.vertices().size(), 0);
  int ties = 0;
  for (const auto& r : res) {
    ++counts[r.vertex];
    ties += r.tie;
  }
  std::vector<int> atom_of_vertex;
  DiscreteMeasure m = atoms_from_counts(K, counts, n, &atom_of_vertex);
  std::vector<int> image;
  image.reserve(res.size());
  for (const auto& r : res) image.push_back(atom_of_vertex[r.vertex]);
  return {std::move(m), std::move(image), ties};
}

DualPair dual_potentials(const ConvexBody& K, const PointList& normals, const PointList& directions) {
  std::vector<double> phi, psi;
  for (const Vec& n : normals) phi.push_back(-std::log(support_function(K, n)));
  for (const Vec& x : directions) psi.push_back(std::log(radial_function(K, x)));
  return {Potential(normals, std::move(phi)), Potential(directions, std::move(psi))};
}

CapReport verify_aleksandrov_caps(const DiscreteMeasure& mu, int n_caps, std::uint64_t seed) {
  if (!mu.space.is_sphere() || mu.space.ambient_dim() != 3)
    throw ConfigError("verify_aleksandrov_caps: measures on S^2 only");
  Rng rng(seed);
  CapReport rep;
  rep.n_caps = n_caps;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_caps; ++k) {
    const Vec c = uniform_sample(mu.space, 1, rng.index(UINT64_MAX)).front();
    const double r = rng.uniform(0.0, 0.5 * std::numbers::pi);
    double mass = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      if (geodesic_distance(mu.space, c, mu.points[i]) <= r) mass += mu.weights[i];
    const double margin = 0.5 * (1.0 + std::sin(r)) - mass;
    if (!(margin > 0.0)) ++rep.violations;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_center = c;
      rep.worst_radius = r;
    }
  }
  return rep;
}

InducedMap reflector_map(const CostModel& model, const Potential& psi, const PointList& X) {
  if (model.kind() != CostKind::Reflector) throw ConfigError("reflector_map: reflector cost required");
  return induced_map(model, psi, X);
}

PointList antipodal_grid(int n) {
  if (n < 2 || n % 2 != 0) throw ConfigError("antipodal_grid: n must be even and >= 2");
  PointList p = fibonacci_grid(3, n / 2);
  const std::size_t half = p.size();
  for (std::size_t i = 0; i < half; ++i) p.push_back(-p[i]);
  return p;
}

}  // namespace mtw
