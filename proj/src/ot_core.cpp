#include "mtwlab/ot_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "mtwlab/c_geometry.hpp"
#include "mtwlab/network_simplex.hpp"
#include "mtwlab/rng.hpp"

namespace mtw {

DiscreteMeasure::DiscreteMeasure(GroundSpace sp, PointList pts, std::vector<double> w)
    : space(sp), points(std::move(pts)), weights(std::move(w)) {
  if (points.empty()) throw ConfigError("DiscreteMeasure: no atoms");
  if (points.size() != weights.size()) throw ConfigError("DiscreteMeasure: points/weights length mismatch");
  double total = 0.0;
  for (double v : weights) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("DiscreteMeasure: weights must be finite and >= 0");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-10) throw ConfigError("DiscreteMeasure: weights must sum to 1");
  for (const Vec& p : points)
    if (!space.contains(p, 1e-9)) throw ConfigError("DiscreteMeasure: atom outside the ground space");
}

DiscreteMeasure DiscreteMeasure::uniform(const GroundSpace& sp, PointList pts) {
  const std::size_t n = pts.size();
  if (n == 0) throw ConfigError("DiscreteMeasure: no atoms");
  return {sp, std::move(pts), std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> s(rows, 0.0);
  for (const auto& e : entries) s[e.i] += e.mass;
  return s;
}

std::vector<double> TransportPlan::col_sums() const {
  std::vector<double> s(cols, 0.0);
  for (const auto& e : entries) s[e.j] += e.mass;
  return s;
}

namespace {

template <class F>
CostMatrix fill_matrix(int rows, int cols, Exec exec, F&& entry) {
  CostMatrix c;
  c.rows = rows;
  c.cols = cols;
  c.value.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  c.finite.assign(static_cast<std::size_t>(rows) * cols, 0);
  auto row = [&](int i) {
    for (int j = 0; j < cols; ++j) {
      const ExtendedReal v = entry(i, j);
      const std::size_t k = static_cast<std::size_t>(i) * cols + j;
      c.finite[k] = v.is_finite();
      c.value[k] = v.value_or(0.0);
    }
  };
  if (exec == Exec::Serial) {
    for (int i = 0; i < rows; ++i) row(i);
  } else {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) row(i);
  }
  return c;
}

}  // namespace

CostMatrix cost_matrix(const CostModel& model, const PointList& X, const PointList& Y, Exec exec) {
  return fill_matrix(static_cast<int>(X.size()), static_cast<int>(Y.size()), exec,
                     [&](int i, int j) { return cost(model, X[i], Y[j]); });
}

CostMatrix distance_matrix(const GroundSpace& space, const PointList& X, const PointList& Y, Exec exec) {
  return fill_matrix(static_cast<int>(X.size()), static_cast<int>(Y.size()), exec, [&](int i, int j) {
    return ExtendedReal::finite(geodesic_distance(space, X[i], Y[j]));
  });
}

namespace {

std::string hall_witness(const TransportProblem& p) {
  const MaxFlowResult mf = bipartite_max_flow(p);
  double mass_b = 0.0, mass_nb = 0.0;
  std::ostringstream os;
  os << "Hall condition violated: sources B = {";
  bool first = true;
  for (std::size_t i = 0; i < p.supply.size(); ++i)
    if (mf.source_side[i]) {
      mass_b += p.supply[i];
      os << (first ? "" : ",") << i;
      first = false;
    }
  for (std::size_t j = 0; j < p.demand.size(); ++j)
    if (mf.sink_side[j]) mass_nb += p.demand[j];
  os.precision(12);
  os << "} have mu(B) = " << mass_b << " > nu(N(B)) = " << mass_nb
     << " on finite-cost neighbors; max finite-cost flow = " << mf.value;
  return os.str();
}

}  // namespace

LpResult solve_transport_lp(const CostMatrix& c, const std::vector<double>& a, const std::vector<double>& b) {
  if (static_cast<int>(a.size()) != c.rows || static_cast<int>(b.size()) != c.cols)
    throw ConfigError("solve_transport_lp: marginal sizes do not match the cost matrix");
  TransportProblem p;
  p.supply = a;
  p.demand = b;
  for (int i = 0; i < c.rows; ++i)
    for (int j = 0; j < c.cols; ++j)
      if (c.allowed(i, j)) p.arcs.push_back({i, j, c.at(i, j)});
  const TransportSolution s = solve_transport(p);
  if (!s.feasible) throw InfeasibleError("no finite-cost coupling exists. " + hall_witness(p));

  LpResult r;
  r.plan.rows = c.rows;
  r.plan.cols = c.cols;
  for (std::size_t e = 0; e < p.arcs.size(); ++e)
    if (s.flow[e] > 1e-15) {
      r.plan.entries.push_back({p.arcs[e].source, p.arcs[e].sink, s.flow[e]});
      r.value += s.flow[e] * p.arcs[e].cost;
    }
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u = s.u, v = s.v;
  for (int j = 0; j < c.cols; ++j) {
    double best = inf;
    for (int i = 0; i < c.rows; ++i)
      if (c.allowed(i, j)) best = std::min(best, c.at(i, j) - u[i]);
    if (best < inf) v[j] = best;
  }
  for (int i = 0; i < c.rows; ++i) {
    double best = inf;
    for (int j = 0; j < c.cols; ++j)
      if (c.allowed(i, j)) best = std::min(best, c.at(i, j) - v[j]);
    if (best < inf) u[i] = best;
  }
  const double shift = v.empty() ? 0.0 : v[0];
  for (double& x : v) x -= shift;
  for (double& x : u) x += shift;
  double dual = 0.0;
  for (int i = 0; i < c.rows; ++i) dual += a[i] * u[i];
  for (int j = 0; j < c.cols; ++j) dual += b[j] * v[j];
  r.u = std::move(u);
  r.v = std::move(v);
  r.duality_gap = r.value - dual;
  return r;
}

SolveResult solve_discrete_ot(const CostModel& model, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!(mu.space == model.space()) || !(nu.space == model.space()))
    throw ConfigError("solve_discrete_ot: measures live on a different ground space than the cost");
  const CostMatrix c = cost_matrix(model, mu.points, nu.points);
  LpResult lp = solve_transport_lp(c, mu.weights, nu.weights);
  SolveResult r;
  r.plan = std::move(lp.plan);
  r.primal_value = lp.value;
  r.dual_phi = Potential(mu.points, std::move(lp.u));
  r.dual_psi = Potential(nu.points, std::move(lp.v));
  r.duality_gap = lp.duality_gap;
  return r;
}

double wasserstein1(const GroundSpace& space, const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (!(a.space == space) || !(b.space == space)) throw ConfigError("wasserstein1: ground space mismatch");
  return solve_transport_lp(distance_matrix(space, a.points, b.points), a.weights, b.weights).value;
}

std::vector<int> plan_to_map(const TransportPlan& plan, double tol) {
  std::vector<int> T(plan.rows, -1);
  std::vector<double> best(plan.rows, 0.0);
  for (const auto& e : plan.entries) {
    if (e.mass <= tol) continue;
    if (T[e.i] >= 0) throw DomainError("plan_to_map: row " + std::to_string(e.i) + " splits its mass");
    T[e.i] = e.j;
    best[e.i] = e.mass;
  }
  for (int i = 0; i < plan.rows; ++i)
    if (T[i] < 0) throw DomainError("plan_to_map: row " + std::to_string(i) + " carries no mass");
  return T;
}

TransportPlan map_plan(const std::vector<double>& weights, const std::vector<int>& T, int cols) {
  TransportPlan p;
  p.rows = static_cast<int>(weights.size());
  p.cols = cols;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) p.entries.push_back({static_cast<int>(i), T[i], weights[i]});
  return p;
}

double suboptimality_gap(const CostModel& model, const TransportPlan& gamma, const DiscreteMeasure& mu,
                         const DiscreteMeasure& nu, const std::vector<int>& T) {
  if (gamma.rows != static_cast<int>(mu.size()) || gamma.cols != static_cast<int>(nu.size()) ||
      T.size() != mu.size())
    throw DomainError("suboptimality_gap: size mismatch");
  const auto rs = gamma.row_sums();
  const auto cs = gamma.col_sums();
  std::vector<double> push(nu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) push[T[i]] += mu.weights[i];
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (std::abs(rs[i] - mu.weights[i]) > 1e-8) throw DomainError("suboptimality_gap: row marginal mismatch");
  for (std::size_t j = 0; j < nu.size(); ++j)
    if (std::abs(cs[j] - push[j]) > 1e-8) throw DomainError("suboptimality_gap: column marginal is not T#mu");
  double plan_cost = 0.0, map_cost = 0.0;
  for (const auto& e : gamma.entries) plan_cost += e.mass * finite_cost(model, mu.points[e.i], nu.points[e.j]);
  for (std::size_t i = 0; i < mu.size(); ++i)
    map_cost += mu.weights[i] * finite_cost(model, mu.points[i], nu.points[T[i]]);
  return plan_cost - map_cost;
}

double plan_map_distance_w1(const TransportPlan& gamma, const std::vector<int>& T, const DiscreteMeasure& nu) {
  double s = 0.0;
  for (const auto& e : gamma.entries) s += e.mass * geodesic_distance(nu.space, nu.points[T[e.i]], nu.points[e.j]);
  return s;
}

namespace {

// Candidate ball centers through pairs of atoms at distance < 2 beta.
std::vector<Vec> pair_centers(const GroundSpace& sp, const Vec& a, const Vec& b, double beta) {
  std::vector<Vec> out;
  const double theta = geodesic_distance(sp, a, b);
  if (theta >= 2.0 * beta || theta < 1e-14) return out;
  if (sp.is_sphere() && sp.ambient_dim() == 3) {
    const Vec s = a + b;
    if (norm(s) < 1e-12) return out;
    const Vec m = s / norm(s);
    Vec n{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    n = n / norm(n);
    const double lam = std::cos(beta) / std::cos(0.5 * theta);
    const double mu = std::sqrt(std::max(0.0, 1.0 - lam * lam));
    out.push_back(normalized(lam * m + mu * n));
    out.push_back(normalized(lam * m - mu * n));
  } else if (!sp.is_sphere() && sp.ambient_dim() == 2) {
    const Vec mid = 0.5 * (a + b);
    const Vec dir = (b - a) / theta;
    const Vec perp{-dir[1], dir[0]};
    const double h = std::sqrt(std::max(0.0, beta * beta - 0.25 * theta * theta));
    out.push_back(mid + h * perp);
    out.push_back(mid - h * perp);
  }
  return out;
}

}  // namespace

double mass_concentration(const DiscreteMeasure& measure, double beta) {
  if (!(beta > 0.0)) throw ConfigError("mass_concentration: beta must be > 0");
  const GroundSpace& sp = measure.space;
  const std::size_t n = measure.size();
  std::vector<std::vector<int>> near(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (geodesic_distance(sp, measure.points[i], measure.points[j]) < 2.0 * beta + 1e-12)
        near[i].push_back(static_cast<int>(j));
  auto ball_mass = [&](const Vec& c, std::size_t anchor, bool closed) {
    double s = 0.0;
    for (int j : near[anchor]) {
      const double d = geodesic_distance(sp, c, measure.points[j]);
      if (closed ? d <= beta + 1e-12 : d < beta) s += measure.weights[j];
    }
    return s;
  };
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    best = std::max(best, ball_mass(measure.points[i], i, false));
    for (int j : near[i]) {
      if (j <= static_cast<int>(i)) continue;
      for (const Vec& c : pair_centers(sp, measure.points[i], measure.points[j], beta))
        best = std::max(best, ball_mass(c, i, true));
    }
  }
  return std::min(best, 1.0);
}

TransportPlan hall_feasible_plan(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double beta) {
  const double mm = mass_concentration(mu, beta);
  const double mn = mass_concentration(nu, beta);
  if (mm > 0.5 || mn > 0.5) {
    std::ostringstream os;
    os.precision(12);
    os << "hall_feasible_plan: mass concentration exceeds 1/2 (M_mu = " << mm << ", M_nu = " << mn << ")";
    throw InfeasibleError(os.str());
  }
  TransportProblem p;
  p.supply = mu.weights;
  p.demand = nu.weights;
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      if (geodesic_distance(mu.space, mu.points[i], nu.points[j]) >= 0.5 * beta)
        p.arcs.push_back({static_cast<int>(i), static_cast<int>(j), 0.0});
  const MaxFlowResult mf = bipartite_max_flow(p);
  if (mf.value < 1.0 - 1e-9) throw InfeasibleError("hall_feasible_plan: " + hall_witness(p));
  TransportPlan plan;
  plan.rows = static_cast<int>(mu.size());
  plan.cols = static_cast<int>(nu.size());
  for (std::size_t a = 0; a < p.arcs.size(); ++a)
    if (mf.flow[a] > 1e-15) plan.entries.push_back({p.arcs[a].source, p.arcs[a].sink, mf.flow[a]});
  return plan;
}

double lipschitz_estimate(const GroundSpace& space, const Potential& f) { return lipschitz_constant(space, f); }

double lipschitz_estimate(const CostModel& model, double eps, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("lipschitz_estimate: n must be positive");
  const GroundSpace& sp = model.space();
  Rng rng(seed);
  double lip = 0.0;
  constexpr double r = 1e-4;
  for (int k = 0; k < n; ++k) {
    const auto [x, y] = sample_domain_pair(model, eps, rng);
    const Vec x2 = exp_map(sp, x, r * random_unit_tangent(sp, x, rng));
    const Vec y2 = exp_map(sp, y, r * random_unit_tangent(sp, y, rng));
    if (!in_domain(model, x2, y2, eps)) continue;
    const ExtendedReal c1 = cost(model, x, y), c2 = cost(model, x2, y2);
    if (!c1.is_finite() || !c2.is_finite()) continue;
    const double d = geodesic_distance(sp, x, x2) + geodesic_distance(sp, y, y2);
    if (d > 0.0) lip = std::max(lip, std::abs(c2.value() - c1.value()) / d);
  }
  return lip;
}

double support_min_distance(const TransportPlan& gamma, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : gamma.entries)
    if (e.mass > 1e-12) best = std::min(best, geodesic_distance(mu.space, mu.points[e.i], nu.points[e.j]));
  if (best == std::numeric_limits<double>::infinity()) throw DomainError("support_min_distance: empty plan");
  return best;
}

SupportBound support_bound_chain(double beta) {
  SupportBound s;
  s.beta = beta;
  s.eps_pair = reflector_h_inverse(4.0 * reflector_h(0.5 * beta));
  s.eps = std::min(beta, s.eps_pair);
  const double c_min = -std::log(2.0);
  s.C_eps = reflector_h(s.eps) + 2.0 * reflector_h(0.5 * s.eps) + 2.0 * std::abs(c_min);
  s.delta = reflector_h_inverse(s.C_eps);
  return s;
}

}  // namespace mtw
