#include "mtwlab/stability_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mtwlab/c_geometry.hpp"
#include "mtwlab/rng.hpp"

namespace mtw {

void SweepConfig::validate() const {
  if (n_source < 1 || n_target < 1) throw ConfigError("config: grid sizes must be positive");
  if (!(eps > 0.0)) throw ConfigError("config: eps must be > 0");
  if (model == CostKind::Gauss && !(eps < std::numbers::pi / 2)) throw ConfigError("config: gauss eps must be < pi/2");
  for (std::size_t k = 0; k < perturbations.size(); ++k) {
    if (!(perturbations[k] > 0.0)) throw ConfigError("config: perturbations must be > 0");
    if (k > 0 && !(perturbations[k] > perturbations[k - 1]))
      throw ConfigError("config: perturbations must be sorted ascending");
  }
  if (n_instances < 1 || n_plans < 1 || n_pairs < 1) throw ConfigError("config: counts must be positive");
  if (!(beta > 0.0)) throw ConfigError("config: beta must be > 0");
}

namespace {

PointList normalize_all(PointList pts) {
  for (Vec& p : pts) p = normalized(p);
  return pts;
}

PointList rotated_grid(int n, std::uint64_t seed) {
  return normalize_all(mtw::apply(random_rotation(3, seed), fibonacci_grid(3, n)));
}

std::vector<Vec> tangent_directions(const GroundSpace& sp, const PointList& pts, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec> d;
  d.reserve(pts.size());
  for (const Vec& p : pts) d.push_back(random_unit_tangent(sp, p, rng));
  return d;
}

PointList displace(const GroundSpace& sp, const PointList& pts, const std::vector<Vec>& dirs, double t) {
  PointList out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out.push_back(t == 0.0 ? pts[i] : exp_map(sp, pts[i], t * dirs[i]));
  return out;
}

// Union of point lists with duplicates (up to rounding) merged; index maps into the union.
PointList merge_points(const std::vector<const PointList*>& lists, std::vector<std::vector<int>>& maps) {
  PointList all;
  maps.assign(lists.size(), {});
  for (std::size_t l = 0; l < lists.size(); ++l)
    for (const Vec& p : *lists[l]) {
      int found = -1;
      for (std::size_t k = 0; k < all.size() && found < 0; ++k)
        if (norm(all[k] - p) <= 1e-12) found = static_cast<int>(k);
      if (found < 0) {
        found = static_cast<int>(all.size());
        all.push_back(p);
      }
      maps[l].push_back(found);
    }
  return all;
}

std::vector<int> compose(const std::vector<int>& T, const std::vector<int>& into) {
  std::vector<int> out(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) out[i] = into[T[i]];
  return out;
}

int domain_violations(const CostModel& model, double eps, const PointList& X, const PointList& Y,
                      const std::vector<int>& T) {
  int v = 0;
  for (std::size_t i = 0; i < X.size(); ++i) v += !in_domain(model, X[i], Y[T[i]], eps);
  return v;
}

struct CertifiedMap {
  MaxMarginPotential mm;
  ConcavityCertificate cert;
};

CertifiedMap certified_potential(const CostModel& model, double eps, const PointList& X, const PointList& Y,
                                 const std::vector<int>& assignment) {
  CertifiedMap c;
  c.mm = max_margin_potential(model, X, Y, assignment);
  c.cert = certify_strong_c_concavity(model, c.mm.psi, eps, X);
  return c;
}

void require_positive(double C, const std::string& where) {
  if (!(C > 0.0)) {
    std::ostringstream os;
    os.precision(12);
    os << where << ": strong c-concavity certificate returned C = " << C
       << " <= 0 (the potential is not strongly c-concave on the tested triples)";
    throw DomainError(os.str());
  }
}

double integral_sq_distance(const GroundSpace& sp, const std::vector<double>& w, const PointList& Y,
                            const std::vector<int>& A, const std::vector<int>& B) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = geodesic_distance(sp, Y[A[i]], Y[B[i]]);
    s += w[i] * d * d;
  }
  return s;
}

CostModel sphere_model(CostKind kind) { return {kind, GroundSpace::sphere(3)}; }

}  // namespace

std::vector<BoundRow> run_target_stability(const SweepConfig& config) {
  config.validate();
  if (config.n_source != config.n_target)
    throw ConfigError("target stability: n_source must equal n_target (uniform grids give permutation maps)");
  const CostModel model = sphere_model(config.model);
  const GroundSpace& sp = model.space();
  const PointList X = rotated_grid(config.n_source, mix_seed(config.seed, 1));
  const PointList Y0 = rotated_grid(config.n_target, mix_seed(config.seed, 2));
  const std::vector<Vec> dirs = tangent_directions(sp, Y0, mix_seed(config.seed, 3));
  const DiscreteMeasure mu = DiscreteMeasure::uniform(sp, X);
  const DiscreteMeasure nu0 = DiscreteMeasure::uniform(sp, Y0);
  const std::vector<int> T0 = plan_to_map(solve_discrete_ot(model, mu, nu0).plan);

  std::vector<BoundRow> rows;
  std::vector<double> ts{0.0};
  ts.insert(ts.end(), config.perturbations.begin(), config.perturbations.end());
  for (double t : ts) {
    const PointList Y1 = displace(sp, Y0, dirs, t);
    const DiscreteMeasure nu1 = DiscreteMeasure::uniform(sp, Y1);
    const std::vector<int> T1 = plan_to_map(solve_discrete_ot(model, mu, nu1).plan);
    std::vector<std::vector<int>> maps;
    const PointList Yall = merge_points({&Y0, &Y1}, maps);
    const auto s0 = compose(T0, maps[0]);
    const auto s1 = compose(T1, maps[1]);
    const CertifiedMap p0 = certified_potential(model, config.eps, X, Yall, s0);
    const CertifiedMap p1 = certified_potential(model, config.eps, X, Yall, s1);
    const double C = std::max(p0.cert.strong_constant_C, p1.cert.strong_constant_C);
    require_positive(C, "target stability");
    const double lip0 = lipschitz_constant(sp, p0.mm.psi);
    const double lip1 = lipschitz_constant(sp, p1.mm.psi);
    const double w1 = wasserstein1(sp, nu0, nu1);
    const double lhs = C * integral_sq_distance(sp, mu.weights, Yall, s0, s1);
    const double rhs = (lip0 + lip1) * w1;
    const int viol = domain_violations(model, config.eps, X, Yall, s0) + domain_violations(model, config.eps, X, Yall, s1);
    BoundRow row = make_row("target", t, lhs, rhs,
                            {{"C", C},
                             {"C_psi0", p0.cert.strong_constant_C},
                             {"C_psi1", p1.cert.strong_constant_C},
                             {"lip_psi0", lip0},
                             {"lip_psi1", lip1},
                             {"w1", w1},
                             {"domain_violations", viol}});
    row.pass = row.pass && viol == 0;
    rows.push_back(std::move(row));
  }

  if (config.binning) {
    const PointList centers = rotated_grid(std::max(4, config.n_target / 4), mix_seed(config.seed, 2));
    std::vector<int> cell(Y0.size());
    for (std::size_t j = 0; j < Y0.size(); ++j) {
      int best = 0;
      for (std::size_t k = 1; k < centers.size(); ++k)
        if (geodesic_distance(sp, Y0[j], centers[k]) < geodesic_distance(sp, Y0[j], centers[best]))
          best = static_cast<int>(k);
      cell[j] = best;
    }
    std::vector<double> wh(centers.size(), 0.0);
    for (std::size_t j = 0; j < Y0.size(); ++j) wh[cell[j]] += nu0.weights[j];
    double h = 0.0;
    for (std::size_t j = 0; j < Y0.size(); ++j) {
      h = std::max(h, geodesic_distance(sp, Y0[j], centers[cell[j]]));
      for (std::size_t k = j + 1; k < Y0.size(); ++k)
        if (cell[j] == cell[k]) h = std::max(h, geodesic_distance(sp, Y0[j], Y0[k]));
    }
    PointList cpts;
    std::vector<double> cw;
    std::vector<int> center_atom(centers.size(), -1);
    for (std::size_t k = 0; k < centers.size(); ++k)
      if (wh[k] > 0.0) {
        center_atom[k] = static_cast<int>(cpts.size());
        cpts.push_back(centers[k]);
        cw.push_back(wh[k]);
      }
    const DiscreteMeasure nuh(sp, cpts, cw);
    const std::vector<int> Th = plan_to_map(solve_discrete_ot(model, mu, nuh).plan);
    std::vector<std::vector<int>> maps;
    const PointList Yall = merge_points({&Y0, &cpts}, maps);
    const auto s0 = compose(T0, maps[0]);
    const auto sh = compose(Th, maps[1]);
    const CertifiedMap p0 = certified_potential(model, config.eps, X, Yall, s0);
    const CertifiedMap ph = certified_potential(model, config.eps, X, Yall, sh);
    const double C = std::max(p0.cert.strong_constant_C, ph.cert.strong_constant_C);
    require_positive(C, "discretization row");
    const double lip0 = lipschitz_constant(sp, p0.mm.psi);
    const double liph = lipschitz_constant(sp, ph.mm.psi);
    const double w1 = wasserstein1(sp, nu0, nuh);
    const double lhs = C * integral_sq_distance(sp, mu.weights, Yall, s0, sh);
    BoundRow row = make_row("binning", h, lhs, (lip0 + liph) * h,
                            {{"C", C}, {"lip_psi0", lip0}, {"lip_psih", liph}, {"w1", w1}, {"h", h}});
    row.pass = row.pass && w1 <= h + default_slack(h);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<int> random_domain_permutation(const CostModel& model, double eps, const PointList& X,
                                           const PointList& Y, Rng& rng) {
  std::vector<int> p(X.size());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::iota(p.begin(), p.end(), 0);
    for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[rng.index(i)]);
    bool ok = true;
    for (std::size_t i = 0; i < p.size() && ok; ++i)
      ok = in_domain(model, X[i], Y[p[i]], eps) && cost(model, X[i], Y[p[i]]).is_finite();
    if (ok) return p;
  }
  throw ConfigError("gap bound: no random permutation plan inside D_eps found");
}

TransportPlan mix_plans(const TransportPlan& a, const TransportPlan& b, double w) {
  std::map<std::pair<int, int>, double> m;
  for (const auto& e : a.entries) m[{e.i, e.j}] += (1.0 - w) * e.mass;
  for (const auto& e : b.entries) m[{e.i, e.j}] += w * e.mass;
  TransportPlan p;
  p.rows = a.rows;
  p.cols = a.cols;
  for (const auto& [k, v] : m)
    if (v > 0.0) p.entries.push_back({k.first, k.second, v});
  return p;
}

}  // namespace

std::vector<BoundRow> run_gap_bound(const SweepConfig& config) {
  config.validate();
  if (config.n_source != config.n_target) throw ConfigError("gap bound: n_source must equal n_target");
  const CostModel model = sphere_model(config.model);
  const GroundSpace& sp = model.space();
  std::vector<BoundRow> rows;
  for (int inst = 0; inst < config.n_instances; ++inst) {
    const std::uint64_t s = mix_seed(config.seed, 100 + inst);
    const PointList X = rotated_grid(config.n_source, mix_seed(s, 1));
    const PointList Y = rotated_grid(config.n_target, mix_seed(s, 2));
    const DiscreteMeasure mu = DiscreteMeasure::uniform(sp, X);
    const DiscreteMeasure nu = DiscreteMeasure::uniform(sp, Y);
    const SolveResult opt = solve_discrete_ot(model, mu, nu);
    const std::vector<int> T = plan_to_map(opt.plan);
    const CertifiedMap pc = certified_potential(model, config.eps, X, Y, T);
    const double C = pc.cert.strong_constant_C;
    require_positive(C, "gap bound");
    const int viol = domain_violations(model, config.eps, X, Y, T);
    Rng rng(mix_seed(s, 3));
    for (int k = 0; k < config.n_plans; ++k) {
      double w = rng.uniform();
      if (k == 0) w = 0.0;
      if (k == config.n_plans - 1 && k > 0) w = 1.0;
      const auto perm = random_domain_permutation(model, config.eps, X, Y, rng);
      const TransportPlan gamma = mix_plans(opt.plan, map_plan(mu.weights, perm, static_cast<int>(Y.size())), w);
      const double gap = suboptimality_gap(model, gamma, mu, nu, T);
      double lhs = 0.0;
      for (const auto& e : gamma.entries) {
        const double d = geodesic_distance(sp, Y[T[e.i]], Y[e.j]);
        lhs += e.mass * C * d * d;
      }
      const double pmd = plan_map_distance_w1(gamma, T, nu);
      const double t = static_cast<double>(inst * config.n_plans + k);
      std::map<std::string, double> consts{{"C", C}, {"gap", gap}, {"mixture_weight", w}, {"instance", inst},
                                           {"domain_violations", viol}};
      BoundRow r1 = make_row("gap", t, lhs, gap, consts);
      BoundRow r2 = make_row("gap_w1", t, pmd, std::sqrt(std::max(gap, 0.0) / C), consts);
      r1.pass = r1.pass && viol == 0;
      r2.pass = r2.pass && viol == 0;
      rows.push_back(std::move(r1));
      rows.push_back(std::move(r2));
    }
  }
  return rows;
}

std::vector<BoundRow> run_both_measures(const SweepConfig& config) {
  config.validate();
  if (config.n_source != config.n_target) throw ConfigError("both measures: n_source must equal n_target");
  if (config.n_source > 80)
    throw ConfigError("both measures: product-space LP too large (at most 80 atoms); use smaller grids");
  const CostModel model = sphere_model(config.model).truncated(config.eps);
  const GroundSpace& sp = model.space();
  const PointList X = rotated_grid(config.n_source, mix_seed(config.seed, 1));
  const PointList Y = rotated_grid(config.n_target, mix_seed(config.seed, 2));
  const auto dx = tangent_directions(sp, X, mix_seed(config.seed, 4));
  const auto dy = tangent_directions(sp, Y, mix_seed(config.seed, 5));
  const DiscreteMeasure mu = DiscreteMeasure::uniform(sp, X);
  const DiscreteMeasure nu = DiscreteMeasure::uniform(sp, Y);
  const std::vector<int> T = plan_to_map(solve_discrete_ot(model, mu, nu).plan);
  const CertifiedMap pc = certified_potential(model, config.eps, X, Y, T);
  const double C = pc.cert.strong_constant_C;
  require_positive(C, "both measures");
  const double lip_c = truncated_cost_lipschitz(model);

  std::vector<BoundRow> rows;
  std::vector<double> ts{0.0};
  ts.insert(ts.end(), config.perturbations.begin(), config.perturbations.end());
  for (double t : ts) {
    const DiscreteMeasure mut = DiscreteMeasure::uniform(sp, displace(sp, X, dx, t));
    const DiscreteMeasure nut = DiscreteMeasure::uniform(sp, displace(sp, Y, dy, t));
    const TransportPlan gt = solve_discrete_ot(model, mut, nut).plan;
    const double e = wasserstein1(sp, mu, mut) + wasserstein1(sp, nu, nut);
    CostMatrix pm;
    pm.rows = static_cast<int>(X.size());
    pm.cols = static_cast<int>(gt.entries.size());
    std::vector<double> wb;
    for (std::size_t i = 0; i < X.size(); ++i)
      for (const auto& g : gt.entries) {
        pm.value.push_back(geodesic_distance(sp, X[i], mut.points[g.i]) +
                           geodesic_distance(sp, Y[T[i]], nut.points[g.j]));
        pm.finite.push_back(1);
      }
    for (const auto& g : gt.entries) wb.push_back(g.mass);
    const double w1p = solve_transport_lp(pm, mu.weights, wb).value;
    const double rhs = e + std::sqrt(2.0 * lip_c / C * e);
    rows.push_back(make_row("both", t, w1p, rhs, {{"C", C}, {"lip_c", lip_c}, {"eps_w1", e}}));
  }
  return rows;
}

double loglog_slope(const std::vector<BoundRow>& rows, const std::string& key) {
  std::vector<double> lx, ly;
  for (const auto& r : rows) {
    const auto it = r.constants.find(key);
    if (it == r.constants.end() || !(it->second > 0.0) || !(r.lhs > 0.0)) continue;
    lx.push_back(std::log(it->second));
    ly.push_back(std::log(r.lhs));
  }
  if (lx.size() < 2) throw ConfigError("loglog_slope: fewer than two usable rows");
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

std::vector<BoundRow> run_holder_check(const CostModel& model, const Potential& psi, double C, const PointList& X,
                                       int n_pairs, std::uint64_t seed) {
  require_positive(C, "holder check");
  const GroundSpace& sp = model.space();
  const double lip_c = truncated_cost_lipschitz(model);
  const InducedMap T = induced_map(model, psi, X);
  Rng rng(seed);
  std::vector<BoundRow> rows;
  for (int k = 0; k < n_pairs; ++k) {
    const auto i = static_cast<int>(rng.index(X.size()));
    const auto j = k == 0 ? i : static_cast<int>(rng.index(X.size()));
    const double dT = geodesic_distance(sp, psi.points[T.index[i]], psi.points[T.index[j]]);
    const double dx = geodesic_distance(sp, X[i], X[j]);
    rows.push_back(make_row("holder", dx, dT * dT, lip_c / C * dx, {{"C", C}, {"lip_c", lip_c}}));
  }
  return rows;
}

std::vector<BoundRow> run_holder_experiment(const SweepConfig& config) {
  config.validate();
  if (config.n_source != config.n_target) throw ConfigError("holder: n_source must equal n_target");
  const CostModel model = sphere_model(config.model).truncated(config.eps);
  const GroundSpace& sp = model.space();
  const PointList X = rotated_grid(config.n_source, mix_seed(config.seed, 1));
  const PointList Y = rotated_grid(config.n_target, mix_seed(config.seed, 2));
  const std::vector<int> T =
      plan_to_map(solve_discrete_ot(model, DiscreteMeasure::uniform(sp, X), DiscreteMeasure::uniform(sp, Y)).plan);
  const CertifiedMap pc = certified_potential(model, config.eps, X, Y, T);
  return run_holder_check(model, pc.mm.psi, pc.cert.strong_constant_C, X, config.n_pairs, mix_seed(config.seed, 6));
}

namespace {

DiscreteMeasure random_measure(const GroundSpace& sp, int n, std::uint64_t seed) {
  PointList pts = uniform_sample(sp, n, seed);
  Rng rng(mix_seed(seed, 7));
  std::vector<double> w(n);
  double total = 0.0;
  for (double& v : w) total += (v = rng.uniform(0.5, 1.5));
  for (double& v : w) v /= total;
  const double drift = 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
  w.back() += drift;
  return {sp, std::move(pts), std::move(w)};
}

}  // namespace

std::vector<BoundRow> run_support_localization(const SweepConfig& config) {
  config.validate();
  const CostModel model = CostModel::reflector(3);
  const GroundSpace& sp = model.space();
  const SupportBound chain = support_bound_chain(config.beta);
  const double h_half = reflector_h(0.5 * config.beta);
  std::vector<BoundRow> rows;
  for (int inst = 0; inst < config.n_instances; ++inst) {
    const std::uint64_t s = mix_seed(config.seed, 200 + inst);
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt >= 50) throw ConfigError("support localization: measure filter failed after 50 retries");
      const DiscreteMeasure mu = random_measure(sp, config.n_source, mix_seed(s, 2 * attempt));
      const DiscreteMeasure nu = random_measure(sp, config.n_target, mix_seed(s, 2 * attempt + 1));
      const double mm = mass_concentration(mu, config.beta);
      const double mn = mass_concentration(nu, config.beta);
      if (!(mm < 0.125 && mn < 0.125)) continue;
      const SolveResult opt = solve_discrete_ot(model, mu, nu);
      const double dmin = support_min_distance(opt.plan, mu, nu);
      const TransportPlan hall = hall_feasible_plan(mu, nu, config.beta);
      const double hall_d = support_min_distance(hall, mu, nu);
      double hall_cost = 0.0;
      for (const auto& e : hall.entries) hall_cost += e.mass * finite_cost(model, mu.points[e.i], nu.points[e.j]);
      std::map<std::string, double> consts{{"M_mu", mm},         {"M_nu", mn},          {"eps", chain.eps},
                                           {"C_eps", chain.C_eps}, {"delta", chain.delta}, {"instance", inst},
                                           {"attempts", attempt + 1}};
      const double t = static_cast<double>(inst);
      rows.push_back(make_row("support", t, chain.delta, dmin, consts));
      rows.push_back(make_row("hall_distance", t, 0.5 * config.beta, hall_d, consts));
      rows.push_back(make_row("hall_cost", t, hall_cost, h_half, consts));
      break;
    }
  }
  return rows;
}

std::vector<BoundRow> run_gauss_experiment(const ConvexBody& K0, const std::vector<NamedBody>& family,
                                           const GaussExperimentConfig& config) {
  if (!(config.r > 0.0 && config.R >= config.r)) throw ConfigError("gauss experiment: need 0 < r <= R");
  auto check_radii = [&](const ConvexBody& B, const std::string& name) {
    if (B.inradius() < config.r - 1e-12 || B.circumradius() > config.R + 1e-12) {
      std::ostringstream os;
      os.precision(12);
      os << "gauss experiment: body '" << name << "' is not in K(" << config.r << ", " << config.R
         << "): inradius " << B.inradius() << ", circumradius " << B.circumradius();
      throw ConfigError(os.str());
    }
  };
  check_radii(K0, "K0");
  for (const auto& nb : family) check_radii(nb.body, nb.name);

  const CostModel model = CostModel::gauss(3);
  const GroundSpace& sp = model.space();
  const double reach = std::acos(config.r / config.R);
  const double eps = std::numbers::pi / 2 - reach;
  const PointList grid = rotated_grid(config.n_grid, mix_seed(config.seed, 9));
  const GridPushforward pk = gauss_pushforward(K0, grid);

  std::vector<BoundRow> rows;
  for (std::size_t b = 0; b < family.size(); ++b) {
    const ConvexBody& L = family[b].body;
    const GridPushforward pl = gauss_pushforward(L, grid);
    std::vector<std::vector<int>> maps;
    const PointList U = merge_points({&pk.measure.points, &pl.measure.points}, maps);
    const DualPair dk = dual_potentials(K0, grid, U);
    const DualPair dl = dual_potentials(L, grid, U);
    const InducedMap Tk = induced_map(model, dk.psi, grid);
    const InducedMap Tl = induced_map(model, dl.psi, grid);
    int mismatches = 0, out_of_domain = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      mismatches += Tk.index[i] != maps[0][pk.image[i]];
      mismatches += Tl.index[i] != maps[1][pl.image[i]];
      out_of_domain += geodesic_distance(sp, grid[i], U[Tk.index[i]]) > reach + 1e-12;
      out_of_domain += geodesic_distance(sp, grid[i], U[Tl.index[i]]) > reach + 1e-12;
    }
    const ConcavityCertificate ck = certify_strong_c_concavity(model, dk.psi, eps, grid);
    const ConcavityCertificate cl = certify_strong_c_concavity(model, dl.psi, eps, grid);
    const double C = std::max(ck.strong_constant_C, cl.strong_constant_C);
    require_positive(C, "gauss experiment (" + family[b].name + ")");
    const double lipk = lipschitz_constant(sp, dk.psi);
    const double lipl = lipschitz_constant(sp, dl.psi);
    const double w1 = wasserstein1(sp, pk.measure, pl.measure);
    double lhs = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = geodesic_distance(sp, U[Tk.index[i]], U[Tl.index[i]]);
      lhs += d * d / static_cast<double>(grid.size());
    }
    BoundRow row = make_row("gauss:" + family[b].name, static_cast<double>(b), lhs, (lipk + lipl) / C * w1,
                            {{"C", C},
                             {"lip_psiK", lipk},
                             {"lip_psiL", lipl},
                             {"w1", w1},
                             {"eps", eps},
                             {"map_mismatches", mismatches},
                             {"domain_violations", out_of_domain},
                             {"ties", pk.ties + pl.ties}});
    row.pass = row.pass && mismatches == 0 && out_of_domain == 0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::pair<ConvexBody, std::vector<NamedBody>> default_gauss_family(std::uint64_t seed) {
  ConvexBody K0 = ConvexBody::ball(3, 200);
  std::vector<NamedBody> fam;
  auto aniso = [&](double a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
    m(0, 0) = 1.0 + a;
    m(2, 2) = 1.0 / (1.0 + a);
    return K0.transformed(m);
  };
  fam.push_back({"anisotropic_0.03", aniso(0.03)});
  fam.push_back({"anisotropic_0.05", aniso(0.05)});
  fam.push_back({"rotated_0.1", K0.transformed(plane_rotation(3, 0, 1, 0.1))});
  fam.push_back({"homothetic_1.05", K0.scaled(1.05)});
  fam.push_back({"random_polytope", ConvexBody::random_polytope(3, 300, mix_seed(seed, 11), 0.97)});
  return {std::move(K0), std::move(fam)};
}

namespace {

// Minimizer of y -> c(x,y) - a<v,y> on the sphere by Riemannian gradient descent with backtracking.
Vec smooth_minimizer(const CostModel& model, const Vec& x, const Vec& v, double a, const Vec& start) {
  const GroundSpace& sp = model.space();
  auto f = [&](const Vec& y) { return cost(model, x, y).value_or(std::numeric_limits<double>::infinity()) - a * dot(v, y); };
  Vec y = start;
  double step = 0.5;
  for (int it = 0; it < 5000; ++it) {
    const Vec g = grad_y(model, x, y) - a * project_tangent(sp, y, v);
    if (norm(g) < 1e-14) break;
    const double f0 = f(y);
    double s = step;
    Vec cand = exp_map(sp, y, -s * g);
    while (!(f(cand) <= f0 - 0.25 * s * squared_norm(g)) && s > 1e-16) {
      s *= 0.5;
      cand = exp_map(sp, y, -s * g);
    }
    if (s <= 1e-16) break;
    y = cand;
    step = std::min(1.0, 2.0 * s);
  }
  return y;
}

}  // namespace

PipelineResult run_pipeline_soundness(CostKind kind, double eps, std::uint64_t seed, int n_points, double amplitude) {
  const CostModel model = sphere_model(kind);
  const GroundSpace& sp = model.space();
  Rng rng(mix_seed(seed, 1));
  const Vec v = uniform_sample(sp, 1, rng.index(UINT64_MAX)).front();
  const auto psi_fn = [&](const Vec& y) { return amplitude * dot(v, y); };
  const PointList X = rotated_grid(n_points, mix_seed(seed, 2));
  PointList Y;
  std::vector<std::pair<Vec, Vec>> pairs;
  for (const Vec& x : X) {
    const Vec start = kind == CostKind::Reflector ? -x : x;
    const Vec y = smooth_minimizer(model, x, v, amplitude, start);
    Y.push_back(y);
    pairs.emplace_back(x, y);
  }
  const PointList extra = rotated_grid(2 * n_points, mix_seed(seed, 3));
  Y.insert(Y.end(), extra.begin(), extra.end());
  std::vector<double> vals;
  for (const Vec& y : Y) vals.push_back(psi_fn(y));
  const ConcavityCertificate cert = certify_strong_c_concavity(model, Potential(Y, vals), eps, X, 1e-9);

  PipelineResult r;
  r.brute_C = cert.strong_constant_C;
  r.lambda = check_differential_criterion(model, psi_fn, pairs);
  r.mtw_C = verify_mtww(model, eps, 200, 20, mix_seed(seed, 4)).mtw_constant_C;
  const ProofConstants pc = proof_constants(model, eps, 2000, mix_seed(seed, 5));
  r.C1 = pc.C1;
  r.C2 = pc.C2;
  r.applicable = r.lambda > 0.0;
  if (r.applicable) r.modulus = modulus_constant(r.lambda, r.C1, r.C2, r.mtw_C);
  r.pass = !r.applicable || r.brute_C >= r.modulus - 1e-6;
  return r;
}

std::vector<BoundRow> run_reflector_synthesis(int n_grid, std::uint64_t seed) {
  const CostModel model = CostModel::reflector(3);
  const GroundSpace& sp = model.space();
  std::vector<BoundRow> rows;
  const PointList X = antipodal_grid(n_grid);
  const DiscreteMeasure mu = DiscreteMeasure::uniform(sp, X);

  auto feedback_row = [&](const std::string& label, const DiscreteMeasure& nu, double t) {
    const SolveResult sol = solve_discrete_ot(model, mu, nu);
    const std::vector<int> T = plan_to_map(sol.plan);
    const MaxMarginPotential mm = max_margin_potential(model, X, nu.points, T);
    const InducedMap back = reflector_map(model, mm.psi, X);
    const InducedMap lp_back = reflector_map(model, sol.dual_psi, X);
    int mismatch = 0, lp_outside = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      mismatch += back.index[i] != T[i];
      const double at_t = finite_cost(model, X[i], nu.points[T[i]]) - sol.dual_psi.values[T[i]];
      const double best = finite_cost(model, X[i], nu.points[lp_back.index[i]]) - sol.dual_psi.values[lp_back.index[i]];
      lp_outside += at_t > best + 1e-9;
    }
    return make_row(label, t, mismatch + lp_outside, 0.0,
                    {{"primal_value", sol.primal_value},
                     {"duality_gap", sol.duality_gap},
                     {"margin", mm.margin},
                     {"map_mismatches", mismatch},
                     {"dual_argmin_violations", lp_outside}});
  };

  BoundRow anti = feedback_row("antipodal", mu, 0.0);
  const SolveResult self = solve_discrete_ot(model, mu, mu);
  const std::vector<int> Ts = plan_to_map(self.plan);
  int not_antipodal = 0;
  for (std::size_t i = 0; i < X.size(); ++i) not_antipodal += !(X[Ts[i]] == -X[i]);
  anti.constants["not_antipodal"] = not_antipodal;
  anti.constants["value_error"] = std::abs(self.primal_value + std::log(2.0));
  anti.pass = anti.pass && not_antipodal == 0 && std::abs(self.primal_value + std::log(2.0)) <= 1e-10;
  rows.push_back(std::move(anti));

  const Eigen::MatrixXd Rm = random_rotation(3, mix_seed(seed, 1));
  const DiscreteMeasure nu = DiscreteMeasure::uniform(sp, normalize_all(mtw::apply(Rm, X)));
  rows.push_back(feedback_row("rotated", nu, 1.0));

  // Rotating both marginals by a second rotation must leave the optimal map unchanged.
  const Eigen::MatrixXd Q = random_rotation(3, mix_seed(seed, 2));
  const std::vector<int> Ta = plan_to_map(solve_discrete_ot(model, mu, nu).plan);
  const std::vector<int> Tb = plan_to_map(solve_discrete_ot(model, DiscreteMeasure::uniform(sp, normalize_all(mtw::apply(Q, X))),
                                                            DiscreteMeasure::uniform(sp, normalize_all(mtw::apply(Q, nu.points))))
                                              .plan);
  int diff = 0;
  for (std::size_t i = 0; i < Ta.size(); ++i) diff += Ta[i] != Tb[i];
  rows.push_back(make_row("equivariance", 2.0, diff, 0.0, {{"map_differences", diff}}));
  return rows;
}

}  // namespace mtw
