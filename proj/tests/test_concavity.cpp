#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mtwlab/concavity.hpp"
#include "mtwlab/ot_core.hpp"
#include "mtwlab/rng.hpp"

using namespace mtw;

namespace {

GroundSpace square(double a) { return GroundSpace::box(Vec{-a, -a}, Vec{a, a}); }

PointList box_grid(int n, double a) {
  PointList g;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.push_back(Vec{-a + 2 * a * i / (n - 1), -a + 2 * a * j / (n - 1)});
  return g;
}

Potential neg_sq_potential(const PointList& Y) {
  std::vector<double> v;
  for (const Vec& y : Y) v.push_back(-squared_norm(y));
  return {Y, v};
}

}  // namespace

TEST_CASE("c-transform of zero and shifted potentials") {
  const CostModel r = CostModel::reflector(3);
  const PointList X = fibonacci_grid(3, 60);
  const PointList Y = uniform_sample(r.space(), 80, 2);
  const auto t0 = c_transform(r, Potential::zero(Y), X);
  for (std::size_t i = 0; i < X.size(); ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (const Vec& y : Y) m = std::min(m, cost(r, X[i], y).value_or(m));
    CHECK(t0.potential.values[i] == m);
  }
  std::vector<double> shifted(Y.size(), 0.75);
  const auto t1 = c_transform(r, Potential(Y, shifted), X);
  for (std::size_t i = 0; i < X.size(); ++i) CHECK(t1.potential.values[i] == doctest::Approx(t0.potential.values[i] - 0.75));
}

TEST_CASE("reflector c-transform on a symmetric grid is -ln 2 at the antipode") {
  const CostModel r = CostModel::reflector(3);
  PointList Y = fibonacci_grid(3, 50);
  const std::size_t n = Y.size();
  for (std::size_t i = 0; i < n; ++i) Y.push_back(-Y[i]);
  const auto t = c_transform(r, Potential::zero(Y), Y);
  for (std::size_t i = 0; i < Y.size(); ++i) {
    CHECK(t.potential.values[i] == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    CHECK(norm(Y[t.argmin[i]] + Y[i]) < 1e-15);
  }
}

TEST_CASE("c-transform errors when every cost is infinite") {
  const CostModel g = CostModel::gauss(3);
  const Potential psi(PointList{Vec{0, 0, 1}}, {0.0});
  CHECK_THROWS_AS((void)c_transform(g, psi, PointList{Vec{0, 0, -1}}), DomainError);
  CHECK_THROWS_AS((void)Potential(PointList{Vec{0, 0, 1}}, {0.0, 1.0}), ConfigError);
}

TEST_CASE("c-superdifferentials") {
  const CostModel r = CostModel::reflector(3);
  const PointList X = fibonacci_grid(3, 300);
  const PointList Y = uniform_sample(r.space(), 40, 4);
  Rng rng(3);
  std::vector<double> vals;
  for (std::size_t j = 0; j < Y.size(); ++j) vals.push_back(rng.uniform(-0.3, 0.3));
  const auto phi = c_transform(r, Potential(Y, vals), X).potential;
  const Potential psicc = c_transform_back(r, phi, Y).potential;
  for (int j = 0; j < static_cast<int>(Y.size()); ++j) CHECK_FALSE(c_superdifferential(r, psicc, j, X).empty());

  Potential lowered = psicc;
  lowered.values[5] -= 10.0;
  CHECK(c_superdifferential(r, lowered, 5, X).empty());
  Potential raised = psicc;
  raised.values[5] += 10.0;
  CHECK(c_superdifferential(r, raised, 5, X).size() > c_superdifferential(r, psicc, 5, X).size());

  const Potential zero = Potential::zero(Y);
  const auto a = c_superdifferential(r, zero, 0, X);
  const auto b = c_superdifferential(r, zero, 1, X);
  for (int i : a) CHECK(std::find(b.begin(), b.end(), i) == b.end());
}

TEST_CASE("strong c-concavity of -|y|^2 for the negative inner product is exactly 1") {
  const CostModel m = CostModel::neg_inner(square(1.0));
  const PointList Y = box_grid(20, 0.5);
  PointList X;
  for (const Vec& y : Y) X.push_back(2.0 * y);
  const ConcavityCertificate c = certify_strong_c_concavity(m, neg_sq_potential(Y), 0.0, X);
  CHECK(c.is_c_concave);
  CHECK(c.strong_constant_C == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.n_admissible_pairs == 400);

  std::vector<std::pair<Vec, Vec>> pairs;
  for (std::size_t k = 0; k < Y.size(); k += 7) pairs.emplace_back(X[k], Y[k]);
  const double lam = check_differential_criterion(m, [](const Vec& y) { return -squared_norm(y); }, pairs);
  CHECK(lam == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("c-affine potentials are not strongly c-concave") {
  const CostModel r = CostModel::reflector(3);
  const Vec x0 = normalized(Vec{0.2, 0.3, 0.9});
  const PointList Y = uniform_sample(r.space(), 200, 6);
  PointList Yf;
  std::vector<double> v;
  for (const Vec& y : Y)
    if (in_domain(r, x0, y, 0.3)) {
      Yf.push_back(y);
      v.push_back(finite_cost(r, x0, y));
    }
  const ConcavityCertificate c = certify_strong_c_concavity(r, Potential(Yf, v), 0.3, PointList{x0});
  CHECK(c.strong_constant_C <= 1e-12);

  const Vec y = Yf.front();
  const double lam = check_differential_criterion(r, [&](const Vec& q) { return finite_cost(r, x0, q); }, {{x0, y}});
  CHECK(std::abs(lam) <= 1e-4);
}

TEST_CASE("zero potential for the reflector cost") {
  const CostModel r = CostModel::reflector(3);
  PointList Y = fibonacci_grid(3, 200);
  const ConcavityCertificate c = certify_strong_c_concavity(r, Potential::zero(Y), 0.3, fibonacci_grid(3, 400));
  CHECK(c.strong_constant_C > 0.0);
  std::vector<std::pair<Vec, Vec>> pairs;
  for (const Vec& x : fibonacci_grid(3, 30)) pairs.emplace_back(x, -x);
  // Hessian of h(d) at d = pi is h''(pi) = 1/2 in every direction.
  CHECK(check_differential_criterion(r, [](const Vec&) { return 0.0; }, pairs) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("certification requires admissible triples") {
  const CostModel g = CostModel::gauss(3);
  const Potential psi(PointList{Vec{0, 0, 1}}, {0.0});
  CHECK_THROWS_AS((void)certify_strong_c_concavity(g, psi, 0.2, PointList{Vec{0, 0, 1}}), DomainError);
}

TEST_CASE("local quadratic regression recovers Hessians") {
  const PointList Y = box_grid(15, 1.0);
  const GroundSpace sq = square(1.0);
  const Eigen::MatrixXd H = fit_local_hessian(sq, neg_sq_potential(Y), 112);
  CHECK((H + 2.0 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-8);

  const GroundSpace s2 = GroundSpace::sphere(3);
  const PointList G = fibonacci_grid(3, 4000);
  const Vec v = normalized(Vec{0.3, -0.2, 0.9});
  std::vector<double> vals;
  for (const Vec& y : G) vals.push_back(dot(v, y));
  const Potential psi(G, vals);
  for (int idx : {10, 1000, 2500}) {
    const Eigen::MatrixXd Hs = fit_local_hessian(s2, psi, idx);
    CHECK((Hs + dot(v, G[idx]) * Eigen::MatrixXd::Identity(2, 2)).norm() < 2e-2);
  }
  CHECK_THROWS_AS((void)fit_local_hessian(sq, neg_sq_potential(Y), 0, 3), ConfigError);
}

TEST_CASE("grid differential criterion matches the smooth one") {
  const CostModel m = CostModel::neg_inner(square(1.0));
  const PointList Y = box_grid(15, 0.5);
  std::vector<std::pair<Vec, int>> pairs;
  for (int k = 0; k < static_cast<int>(Y.size()); k += 11) pairs.emplace_back(2.0 * Y[k], k);
  CHECK(check_differential_criterion_grid(m, neg_sq_potential(Y), pairs) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("proof constants of flat costs") {
  const GroundSpace box = GroundSpace::box(Vec{0, 0, 0}, Vec{1, 1, 1});
  const ProofConstants a = proof_constants(CostModel::neg_inner(box), 0.0, 200, 1);
  CHECK(a.C1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.C2 == doctest::Approx(1.0).epsilon(1e-6));
  const ProofConstants b = proof_constants(CostModel::quadratic(box), 0.0, 200, 1);
  CHECK(b.C1 == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(b.C2 == doctest::Approx(4.0).epsilon(1e-3));
  const ProofConstants r = proof_constants(CostModel::reflector(3), 0.3, 200, 1);
  CHECK(r.C1 > 0.0);
  CHECK(r.C2 > 0.0);
}

TEST_CASE("modulus constant") {
  CHECK(modulus_constant(1, 1, 1, 0) == doctest::Approx(1.0));
  CHECK(modulus_constant(2, 1, 1, std::log(2.0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)modulus_constant(0, 1, 1, 0), DomainError);
  CHECK_THROWS_AS((void)modulus_constant(1, 0, 1, 0), DomainError);
  CHECK_THROWS_AS((void)modulus_constant(1, 1, 1, -1), DomainError);
}

TEST_CASE("proof modulus for -|y|^2 carries the second-order Taylor factor") {
  const GroundSpace sq = square(1.0);
  const CostModel m = CostModel::neg_inner(sq);
  const PointList Y = box_grid(20, 0.5);
  PointList X;
  for (const Vec& y : Y) X.push_back(2.0 * y);
  const double brute = certify_strong_c_concavity(m, neg_sq_potential(Y), 0.0, X).strong_constant_C;
  const ProofConstants pc = proof_constants(m, 0.0, 500, 3);
  const double lam = check_differential_criterion(m, [](const Vec& y) { return -squared_norm(y); }, {{X[0], Y[0]}});
  const double mod = modulus_constant(lam, pc.C1, pc.C2, 0.0);
  CHECK(brute == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mod == doctest::Approx(2.0 * brute).epsilon(1e-6));
  CHECK(0.5 * mod <= brute + 1e-6);
}

TEST_CASE("max-margin potentials reproduce optimal assignments") {
  const CostModel r = CostModel::reflector(3);
  const PointList X = uniform_sample(r.space(), 30, 1);
  const PointList Y = uniform_sample(r.space(), 30, 2);
  const auto mu = DiscreteMeasure::uniform(r.space(), X);
  const auto nu = DiscreteMeasure::uniform(r.space(), Y);
  const std::vector<int> T = plan_to_map(solve_discrete_ot(r, mu, nu).plan);
  const MaxMarginPotential mm = max_margin_potential(r, X, Y, T);
  CHECK(mm.margin > 0.0);
  const InducedMap back = induced_map(r, mm.psi, X);
  CHECK(back.index == T);
  for (std::size_t i = 0; i < X.size(); ++i) CHECK(mm.phi.values[i] == doctest::Approx(c_transform(r, mm.psi, X).potential.values[i]));

  std::vector<int> bad = T;
  std::swap(bad[0], bad[1]);
  CHECK_THROWS_AS((void)max_margin_potential(r, X, Y, bad), DomainError);
}

TEST_CASE("Lipschitz constants of grid potentials") {
  const GroundSpace s2 = GroundSpace::sphere(3);
  const PointList G = fibonacci_grid(3, 300);
  CHECK(lipschitz_constant(s2, Potential::zero(G)) == 0.0);
  const Vec y0 = G[17];
  std::vector<double> v;
  for (const Vec& y : G) v.push_back(geodesic_distance(s2, y, y0));
  const double L = lipschitz_constant(s2, Potential(G, v));
  CHECK(L <= 1.0 + 1e-12);
  CHECK(L >= 0.99);
}
