#include "mtwlab/concavity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mtwlab/c_geometry.hpp"
#include "mtwlab/rng.hpp"

namespace mtw {

Potential::Potential(PointList pts, std::vector<double> vals) : points(std::move(pts)), values(std::move(vals)) {
  if (points.size() != values.size()) throw ConfigError("Potential: points/values length mismatch");
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("Potential: values must be finite");
}

double lipschitz_constant(const GroundSpace& space, const Potential& f) {
  double lip = 0.0;
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = geodesic_distance(space, f.points[i], f.points[j]);
      if (d < 1e-15) continue;
      lip = std::max(lip, std::abs(f.values[i] - f.values[j]) / d);
    }
  return lip;
}

namespace {

struct Argmin {
  double value = 0.0;
  int index = -1;
  bool tie = false;
};

// min_j c(.,.) - v_j with the query point in slot `query_first ? 1 : 2`.
Argmin transform_one(const CostModel& model, const Potential& f, const Vec& q, bool query_first) {
  Argmin best;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const ExtendedReal c = query_first ? cost(model, q, f.points[j]) : cost(model, f.points[j], q);
    if (!c.is_finite()) continue;
    const double v = c.value() - f.values[j];
    if (best.index < 0 || v < best.value - 1e-12) {
      best = {v, static_cast<int>(j), false};
    } else if (v <= best.value + 1e-12) {
      best.tie = true;
      best.value = std::min(best.value, v);
    }
  }
  return best;
}

CTransformResult transform(const CostModel& model, const Potential& f, const PointList& Q, bool query_first,
                           Exec exec) {
  if (f.size() == 0) throw ConfigError("c_transform: empty potential");
  std::vector<Argmin> res(Q.size());
  const auto n = static_cast<long>(Q.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) res[i] = transform_one(model, f, Q[i], query_first);
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) res[i] = transform_one(model, f, Q[i], query_first);
  }
  CTransformResult out;
  std::vector<double> values;
  for (std::size_t i = 0; i < Q.size(); ++i) {
    if (res[i].index < 0) throw DomainError("c_transform: all costs are +infinity at point " + std::to_string(i));
    values.push_back(res[i].value);
    out.argmin.push_back(res[i].index);
    out.tie.push_back(res[i].tie);
  }
  out.potential = Potential(Q, std::move(values));
  return out;
}

}  // namespace

CTransformResult c_transform(const CostModel& model, const Potential& psi, const PointList& X, Exec exec) {
  return transform(model, psi, X, true, exec);
}

CTransformResult c_transform_back(const CostModel& model, const Potential& phi, const PointList& Y, Exec exec) {
  return transform(model, phi, Y, false, exec);
}

std::vector<int> c_superdifferential(const CostModel& model, const Potential& psi, int y_index, const PointList& X,
                                     double tol) {
  if (y_index < 0 || y_index >= static_cast<int>(psi.size())) throw ConfigError("c_superdifferential: bad index");
  std::vector<int> out;
  const Vec& y = psi.points[y_index];
  for (std::size_t i = 0; i < X.size(); ++i) {
    const ExtendedReal cy = cost(model, X[i], y);
    if (!cy.is_finite()) continue;
    const double at_y = psi.values[y_index] - cy.value();
    bool member = true;
    for (std::size_t j = 0; j < psi.size() && member; ++j) {
      const ExtendedReal cz = cost(model, X[i], psi.points[j]);
      if (!cz.is_finite()) continue;
      if (psi.values[j] - cz.value() > at_y + tol) member = false;
    }
    if (member) out.push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

struct ScanResult {
  double C = std::numeric_limits<double>::infinity();
  int x = -1, y = -1, z = -1;
  long long triples = 0;
  int admissible = 0;
  std::vector<int> attached;  // y indices with x in their superdifferential
};

ScanResult scan_point(const CostModel& model, const Potential& psi, double eps, const Vec& x, double tol, int xi) {
  const std::size_t m = psi.size();
  std::vector<double> f(m, std::numeric_limits<double>::infinity());
  std::vector<char> finite(m, 0);
  double fmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    const ExtendedReal c = cost(model, x, psi.points[j]);
    if (!c.is_finite()) continue;
    finite[j] = 1;
    f[j] = c.value() - psi.values[j];
    fmin = std::min(fmin, f[j]);
  }
  ScanResult r;
  for (std::size_t j = 0; j < m; ++j) {
    if (!finite[j] || f[j] > fmin + tol) continue;
    r.attached.push_back(static_cast<int>(j));
    if (!in_domain(model, x, psi.points[j], eps)) continue;
    ++r.admissible;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j || !finite[k] || !in_domain(model, x, psi.points[k], eps)) continue;
      const double d = geodesic_distance(model.space(), psi.points[j], psi.points[k]);
      if (d < 1e-14) continue;
      ++r.triples;
      const double ratio = (f[k] - f[j]) / (d * d);
      if (ratio < r.C) {
        r.C = ratio;
        r.x = xi;
        r.y = static_cast<int>(j);
        r.z = static_cast<int>(k);
      }
    }
  }
  return r;
}

}  // namespace

ConcavityCertificate certify_strong_c_concavity(const CostModel& model, const Potential& psi, double eps,
                                                const PointList& X, double tol, Exec exec) {
  std::vector<ScanResult> res(X.size());
  const auto n = static_cast<long>(X.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) res[i] = scan_point(model, psi, eps, X[i], tol, static_cast<int>(i));
  } else {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) res[i] = scan_point(model, psi, eps, X[i], tol, static_cast<int>(i));
  }
  ConcavityCertificate cert;
  std::vector<char> hit(psi.size(), 0);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : res) {
    cert.n_triples += r.triples;
    cert.n_admissible_pairs += r.admissible;
    for (int j : r.attached) hit[j] = 1;
    if (r.x >= 0 && r.C < best) {
      best = r.C;
      cert.worst_triple = Triple{X[r.x], psi.points[r.y], psi.points[r.z]};
    }
  }
  if (cert.n_triples == 0) throw DomainError("certify_strong_c_concavity: no admissible triples");
  cert.strong_constant_C = best;
  cert.n_empty_superdifferential = static_cast<int>(std::count(hit.begin(), hit.end(), 0));
  cert.is_c_concave = cert.n_empty_superdifferential == 0;
  return cert;
}

namespace {

// Hessian in normal coordinates at y of g, central differences with one Richardson step.
Eigen::MatrixXd normal_hessian(const GroundSpace& sp, const Vec& y, const std::function<double(const Vec&)>& g,
                               double h) {
  const auto frame = tangent_frame(sp, y);
  const auto m = static_cast<Eigen::Index>(frame.size());
  auto at = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    Vec v = si * frame[static_cast<std::size_t>(i)];
    if (j >= 0) v += sj * frame[static_cast<std::size_t>(j)];
    return g(exp_map(sp, y, v));
  };
  auto estimate = [&](double s) {
    Eigen::MatrixXd H(m, m);
    const double g0 = g(y);
    for (Eigen::Index i = 0; i < m; ++i) {
      H(i, i) = (at(i, s, -1, 0) - 2.0 * g0 + at(i, -s, -1, 0)) / (s * s);
      for (Eigen::Index j = i + 1; j < m; ++j) {
        H(i, j) = (at(i, s, j, s) - at(i, s, j, -s) - at(i, -s, j, s) + at(i, -s, j, -s)) / (4.0 * s * s);
        H(j, i) = H(i, j);
      }
    }
    return H;
  };
  return (4.0 * estimate(0.5 * h) - estimate(h)) / 3.0;
}

double min_eigenvalue(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::function<double(const Vec&)> cost_slice(const CostModel& model, const Vec& x) {
  return [&model, x](const Vec& yy) {
    const ExtendedReal c = cost(model, x, yy);
    if (!c.is_finite()) throw DomainError("differential criterion: FD stencil left the finiteness domain");
    return c.value();
  };
}

}  // namespace

double check_differential_criterion(const CostModel& model, const SmoothFunction& psi,
                                    const std::vector<std::pair<Vec, Vec>>& pairs, double fd_step) {
  if (pairs.empty()) throw ConfigError("check_differential_criterion: no pairs");
  double lam = std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : pairs) {
    const auto c = cost_slice(model, x);
    const auto g = [&](const Vec& yy) { return c(yy) - psi(yy); };
    lam = std::min(lam, min_eigenvalue(normal_hessian(model.space(), y, g, fd_step)));
  }
  return lam;
}

Eigen::MatrixXd fit_local_hessian(const GroundSpace& space, const Potential& psi, int index, int k) {
  const Vec& y = psi.points[index];
  std::vector<std::pair<double, int>> nbr;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    if (static_cast<int>(j) == index) continue;
    const double d = geodesic_distance(space, y, psi.points[j]);
    if (d > 1e-14) nbr.emplace_back(d, static_cast<int>(j));
  }
  const int kk = std::min<int>(k, static_cast<int>(nbr.size()));
  std::partial_sort(nbr.begin(), nbr.begin() + kk, nbr.end());
  const auto frame = tangent_frame(space, y);
  const int m = static_cast<int>(frame.size());
  const int n_lin = m;
  const int n_quad = m * (m + 1) / 2;
  if (kk < n_lin + n_quad) throw ConfigError("fit_local_hessian: not enough neighbors");
  const double bandwidth = nbr[kk - 1].first;
  Eigen::MatrixXd A(kk, n_lin + n_quad);
  Eigen::VectorXd b(kk);
  for (int r = 0; r < kk; ++r) {
    const int j = nbr[r].second;
    const Eigen::VectorXd s = to_frame(frame, log_map(space, y, psi.points[j]));
    const double w = std::exp(-0.5 * std::pow(nbr[r].first / bandwidth, 2));
    int col = 0;
    for (int a = 0; a < m; ++a) A(r, col++) = w * s[a];
    for (int a = 0; a < m; ++a)
      for (int c = a; c < m; ++c) A(r, col++) = w * (a == c ? 0.5 * s[a] * s[a] : s[a] * s[c]);
    b[r] = w * (psi.values[j] - psi.values[index]);
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
  Eigen::MatrixXd H(m, m);
  int col = n_lin;
  for (int a = 0; a < m; ++a)
    for (int c = a; c < m; ++c) {
      H(a, c) = sol[col];
      H(c, a) = sol[col];
      ++col;
    }
  return H;
}

double check_differential_criterion_grid(const CostModel& model, const Potential& psi,
                                         const std::vector<std::pair<Vec, int>>& pairs, int k, double fd_step) {
  if (pairs.empty()) throw ConfigError("check_differential_criterion_grid: no pairs");
  double lam = std::numeric_limits<double>::infinity();
  for (const auto& [x, idx] : pairs) {
    const Vec& y = psi.points[idx];
    const Eigen::MatrixXd hc = normal_hessian(model.space(), y, cost_slice(model, x), fd_step);
    lam = std::min(lam, min_eigenvalue(hc - fit_local_hessian(model.space(), psi, idx, k)));
  }
  return lam;
}

namespace {

ProofConstants proof_sample(const CostModel& model, double eps, std::uint64_t seed) {
  Rng rng(seed);
  const auto [x, y] = sample_domain_pair(model, eps, rng);
  ProofConstants pc;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross_hessian(model, x, y));
  const double smax = svd.singularValues()[0];
  pc.C1 = 1.0 / (smax * smax);
  auto ratio = [&](const Vec& z) {
    const double d = geodesic_distance(model.space(), y, z);
    return squared_norm(grad_x(model, x, y) - grad_x(model, x, z)) / (d * d);
  };
  pc.C2 = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Vec z = uniform_sample(model.space(), 1, rng.index(UINT64_MAX)).front();
    if (in_domain(model, x, z, eps) && cost(model, x, z).is_finite() &&
        geodesic_distance(model.space(), y, z) > 1e-9) {
      pc.C2 = std::min(pc.C2, ratio(z));
      break;
    }
  }
  const Vec zn = exp_map(model.space(), y, 1e-3 * random_unit_tangent(model.space(), y, rng));
  if (in_domain(model, x, zn, eps) && cost(model, x, zn).is_finite()) pc.C2 = std::min(pc.C2, ratio(zn));
  return pc;
}

}  // namespace

ProofConstants proof_constants(const CostModel& model, double eps, int n_samples, std::uint64_t seed, Exec exec) {
  if (n_samples < 1) throw ConfigError("proof_constants: n_samples must be positive");
  const CostModel base = model.untruncated();
  std::vector<ProofConstants> res(static_cast<std::size_t>(n_samples));
  if (exec == Exec::Serial) {
    for (int i = 0; i < n_samples; ++i) res[i] = proof_sample(base, eps, mix_seed(seed, i));
  } else {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_samples; ++i) res[i] = proof_sample(base, eps, mix_seed(seed, i));
  }
  ProofConstants out{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& r : res) {
    out.C1 = std::min(out.C1, r.C1);
    out.C2 = std::min(out.C2, r.C2);
  }
  if (!(out.C1 > 0.0) || !(out.C2 > 0.0) || !std::isfinite(out.C2))
    throw DomainError("proof_constants: nonpositive estimate (STwist or compactness violated)");
  return out;
}

double modulus_constant(double lambda, double C1, double C2, double mtw_C) {
  if (!(lambda > 0.0)) throw DomainError("modulus_constant: lambda must be > 0");
  if (!(C1 > 0.0) || !(C2 > 0.0)) throw DomainError("modulus_constant: C1 and C2 must be > 0");
  if (mtw_C < 0.0) throw DomainError("modulus_constant: mtw_C must be >= 0");
  return lambda * C1 * C2 * std::exp(-mtw_C);
}

MaxMarginPotential max_margin_potential(const CostModel& model, const PointList& X, const PointList& Y,
                                        const std::vector<int>& assignment) {
  if (assignment.size() != X.size()) throw ConfigError("max_margin_potential: assignment size mismatch");
  const std::size_t V = Y.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // W(u, z): cheapest exchange u -> z over sources assigned to u.
  std::vector<double> W(V * V, kInf);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const int u = assignment[i];
    if (u < 0 || static_cast<std::size_t>(u) >= V) throw ConfigError("max_margin_potential: bad assignment index");
    const double cu = finite_cost(model, X[i], Y[u]);
    for (std::size_t z = 0; z < V; ++z) {
      if (static_cast<int>(z) == u) continue;
      const ExtendedReal cz = cost(model, X[i], Y[z]);
      if (!cz.is_finite()) continue;
      double& w = W[u * V + z];
      w = std::min(w, cz.value() - cu);
    }
  }
  // Karp: D[k][v] = min weight of a k-edge walk ending at v.
  std::vector<double> D((V + 1) * V, kInf);
  std::fill(D.begin(), D.begin() + static_cast<long>(V), 0.0);
  for (std::size_t k = 1; k <= V; ++k) {
    const double* prev = &D[(k - 1) * V];
    double* cur = &D[k * V];
    for (std::size_t u = 0; u < V; ++u) {
      if (prev[u] == kInf) continue;
      const double* row = &W[u * V];
      for (std::size_t z = 0; z < V; ++z)
        if (row[z] != kInf) cur[z] = std::min(cur[z], prev[u] + row[z]);
    }
  }
  double mean = kInf;
  for (std::size_t v = 0; v < V; ++v) {
    const double dn = D[V * V + v];
    if (dn == kInf) continue;
    double worst = -kInf;
    for (std::size_t k = 0; k < V; ++k) {
      const double dk = D[k * V + v];
      if (dk == kInf) continue;
      worst = std::max(worst, (dn - dk) / static_cast<double>(V - k));
    }
    mean = std::min(mean, worst);
  }
  MaxMarginPotential out;
  out.acyclic = mean == kInf;
  const double s = out.acyclic ? 1.0 : mean;
  if (!(s > 0.0))
    throw DomainError("max_margin_potential: assignment is not the unique optimum (cycle mean " +
                      std::to_string(s) + ")");
  std::vector<double> dist(V, 0.0);
  for (std::size_t it = 0; it < V; ++it) {
    bool changed = false;
    for (std::size_t u = 0; u < V; ++u)
      for (std::size_t z = 0; z < V; ++z) {
        const double w = W[u * V + z];
        if (w == kInf) continue;
        const double cand = dist[u] + (w - s);
        if (cand < dist[z] - 1e-13 * (1.0 + std::abs(dist[z]))) {
          dist[z] = cand;
          changed = true;
        }
      }
    if (!changed) break;
  }
  out.psi = Potential(Y, dist);
  std::vector<double> phi(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) phi[i] = finite_cost(model, X[i], Y[assignment[i]]) - dist[assignment[i]];
  out.phi = Potential(X, phi);
  double margin = kInf;
  for (std::size_t u = 0; u < V; ++u)
    for (std::size_t z = 0; z < V; ++z)
      if (W[u * V + z] != kInf) margin = std::min(margin, W[u * V + z] - dist[z] + dist[u]);
  out.margin = margin;
  return out;
}

InducedMap induced_map(const CostModel& model, const Potential& psi, const PointList& X, Exec exec) {
  const CTransformResult t = c_transform(model, psi, X, exec);
  return {t.argmin, t.tie};
}

}  // namespace mtw
