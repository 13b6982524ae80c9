#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mtwlab/c_geometry.hpp"
#include "mtwlab/cost_models.hpp"
#include "mtwlab/rng.hpp"

using namespace mtw;

namespace {

const Vec e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};

GroundSpace unit_box(int d) {
  Vec lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = -1.0;
    hi[i] = 1.0;
  }
  return GroundSpace::box(lo, hi);
}

std::vector<CostModel> all_models() {
  return {CostModel::reflector(3), CostModel::gauss(3), CostModel::neg_inner(unit_box(3)),
          CostModel::quadratic(unit_box(3))};
}

// Five-point directional derivative of c along a geodesic (or line) through p in direction v.
double fd_directional(const CostModel& m, const Vec& x, const Vec& y, const Vec& v, bool in_x) {
  const double h = 1e-4;
  auto f = [&](double s) {
    const Vec p = exp_map(m.space(), in_x ? x : y, s * v);
    return in_x ? finite_cost(m, p, y) : finite_cost(m, x, p);
  };
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

}  // namespace

TEST_CASE("closed-form cost values") {
  const CostModel r = CostModel::reflector(3);
  const CostModel g = CostModel::gauss(3);
  CHECK(finite_cost(r, e1, e2) == doctest::Approx(0.0));
  CHECK(finite_cost(r, e1, -e1) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK_FALSE(cost(r, e1, e1).is_finite());
  CHECK_FALSE(cost(g, e1, e2).is_finite());
  CHECK_FALSE(cost(g, e1, -e1).is_finite());
  CHECK(finite_cost(g, e1, e1) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)cost(g, e1, e2).value(), DomainError);
  CHECK_THROWS_AS((void)finite_cost(g, e1, e2), DomainError);
}

TEST_CASE("reflector cost is h of the geodesic distance") {
  const CostModel r = CostModel::reflector(3);
  const PointList pts = uniform_sample(r.space(), 401, 17);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double d = geodesic_distance(r.space(), pts[i], pts[i + 1]);
    CHECK(std::abs(finite_cost(r, pts[i], pts[i + 1]) - reflector_h(d)) <= 1e-12);
    CHECK(std::abs(finite_cost(r, pts[i], pts[i + 1]) + std::log(1.0 - dot(pts[i], pts[i + 1]))) <= 1e-12);
  }
}

TEST_CASE("h profile values and inverse") {
  const HProfile h = h_profile(CostModel::reflector(3));
  CHECK(h(std::numbers::pi) == doctest::Approx(-std::log(2.0)));
  CHECK(std::abs(h(std::numbers::pi / 2)) < 1e-15);
  CHECK(h.inverse(0.0) == doctest::Approx(std::numbers::pi / 2));
  for (double v : {-0.69, -0.3, 0.0, 0.5, 2.0, 7.0}) CHECK(std::abs(h(h.inverse(v)) - v) <= 1e-10);
  for (double t = 0.05; t < 3.1; t += 0.05) CHECK(h(t + 0.01) < h(t));
  CHECK_THROWS_AS((void)h.inverse(-0.7), DomainError);
  CHECK_THROWS_AS((void)h_profile(CostModel::gauss(3)), ConfigError);
}

TEST_CASE("gradients at hand-computed points") {
  const CostModel r = CostModel::reflector(3);
  const CostModel g = CostModel::gauss(3);
  CHECK(norm(grad_x(r, e1, e2) - e2) < 1e-15);
  CHECK(norm(grad_x(g, e1, e1)) < 1e-15);
  const GroundSpace box = unit_box(3);
  const Vec x{0.1, 0.2, 0.3}, y{-0.5, 0.4, 0.0};
  CHECK(norm(grad_x(CostModel::neg_inner(box), x, y) + y) < 1e-15);
  CHECK(norm(grad_x(CostModel::quadratic(box), x, y) - 2.0 * (x - y)) < 1e-15);
  CHECK_THROWS_AS((void)grad_x(g, e1, e2), DomainError);
}

TEST_CASE("analytic gradients match five-point finite differences on 200 pairs per model") {
  for (const CostModel& m : all_models()) {
    CAPTURE(to_string(m.kind()));
    Rng rng(mix_seed(42, static_cast<std::uint64_t>(m.kind())));
    const double eps = m.kind() == CostKind::Gauss ? 0.2 : 0.3;
    for (int k = 0; k < 200; ++k) {
      const auto [x, y] = sample_domain_pair(m, eps, rng);
      const Vec gx = grad_x(m, x, y);
      const Vec gy = grad_y(m, x, y);
      const Vec vx = random_unit_tangent(m.space(), x, rng);
      const Vec vy = random_unit_tangent(m.space(), y, rng);
      const double scale = 1.0 + norm(gx) + norm(gy);
      CHECK(std::abs(dot(gx, vx) - fd_directional(m, x, y, vx, true)) <= 1e-5 * scale);
      CHECK(std::abs(dot(gy, vy) - fd_directional(m, x, y, vy, false)) <= 1e-5 * scale);
      if (m.space().is_sphere()) {
        CHECK(std::abs(dot(gx, x)) < 1e-12);
        CHECK(std::abs(dot(gy, y)) < 1e-12);
      }
    }
  }
}

TEST_CASE("cexp inverts minus grad_x on 200 pairs per model") {
  for (const CostModel& m : all_models()) {
    CAPTURE(to_string(m.kind()));
    Rng rng(mix_seed(7, static_cast<std::uint64_t>(m.kind())));
    for (int k = 0; k < 200; ++k) {
      const auto [x, y] = sample_domain_pair(m, 0.2, rng);
      CHECK(norm(cexp(m, x, -grad_x(m, x, y)) - y) <= 1e-9);
    }
  }
}

TEST_CASE("cexp closed forms") {
  const CostModel r = CostModel::reflector(3);
  const CostModel g = CostModel::gauss(3);
  CHECK(norm(cexp(r, e3, Vec::zeros(3)) + e3) < 1e-15);
  CHECK(norm(cexp(g, e3, Vec::zeros(3)) - e3) < 1e-15);
  const Vec y = cexp(g, e3, e1);
  CHECK(geodesic_distance(g.space(), e3, y) == doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("twist: minus grad_x(x, .) is injective on sampled targets") {
  for (const CostModel& m : {CostModel::reflector(3), CostModel::gauss(3)}) {
    Rng rng(5);
    const Vec x = e3;
    PointList ys;
    while (ys.size() < 200) {
      const Vec y = uniform_sample(m.space(), 1, rng.index(UINT64_MAX)).front();
      if (in_domain(m, x, y, 0.2) && cost(m, x, y).is_finite()) ys.push_back(y);
    }
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ys.size(); ++i)
      for (std::size_t j = i + 1; j < ys.size(); ++j)
        gap = std::min(gap, norm(grad_x(m, x, ys[i]) - grad_x(m, x, ys[j])));
    CHECK(gap > 0.0);
  }
}

TEST_CASE("cross Hessians of flat costs and invertibility on sphere domains") {
  const GroundSpace box = unit_box(3);
  const Vec x{0.1, -0.2, 0.3}, y{0.4, 0.5, -0.6};
  CHECK((cross_hessian(CostModel::neg_inner(box), x, y) + Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-8);
  CHECK((cross_hessian(CostModel::quadratic(box), x, y) + 2.0 * Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-7);
  const CostModel r = CostModel::reflector(3);
  Rng rng(3);
  double min_det = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    const auto [a, b] = sample_domain_pair(r, 0.3, rng);
    const Eigen::MatrixXd H = cross_hessian(r, a, b);
    CHECK(H.allFinite());
    min_det = std::min(min_det, std::abs(H.determinant()));
  }
  CHECK(min_det > 0.0);
}

TEST_CASE("domain predicate") {
  const CostModel r = CostModel::reflector(3);
  const CostModel g = CostModel::gauss(3);
  CHECK(in_domain(r, e1, -e1, 0.1));
  CHECK_FALSE(in_domain(r, e1, e1, 0.1));
  CHECK(in_domain(g, e1, e1, 0.1));
  CHECK_FALSE(in_domain(g, e1, e2, 0.1));
  CHECK(in_domain(CostModel::quadratic(unit_box(2)), Vec{0, 0}, Vec{0, 0}, 0.5));
}

TEST_CASE("truncated models are finite, continuous and Lipschitz with the stated constant") {
  const CostModel r = CostModel::reflector(3).truncated(0.3);
  const CostModel g = CostModel::gauss(3).truncated(0.2);
  CHECK(cost(r, e1, e1).is_finite());
  CHECK(finite_cost(r, e1, e1) == doctest::Approx(reflector_h(0.3)));
  CHECK(finite_cost(g, e1, -e1) == doctest::Approx(-std::log(std::sin(0.2))));
  CHECK(truncated_cost_lipschitz(r) == doctest::Approx(1.0 / std::tan(0.15)));
  CHECK(truncated_cost_lipschitz(g) == doctest::Approx(1.0 / std::tan(0.2)));
  for (const CostModel& m : {r, g}) {
    const PointList pts = uniform_sample(m.space(), 600, 8);
    const double L = truncated_cost_lipschitz(m);
    for (int k = 0; k < 200; ++k) {
      const Vec &x = pts[3 * k], &y = pts[3 * k + 1], &z = pts[3 * k + 2];
      CHECK(std::abs(finite_cost(m, x, y) - finite_cost(m, x, z)) <= L * geodesic_distance(m.space(), y, z) + 1e-12);
    }
  }
}

TEST_CASE("cost kind names round-trip") {
  for (CostKind k : {CostKind::Reflector, CostKind::Gauss, CostKind::NegInner, CostKind::Quadratic})
    CHECK(parse_cost_kind(to_string(k)) == k);
  CHECK(parse_cost_kind("neg-inner") == CostKind::NegInner);
  CHECK_THROWS_AS((void)parse_cost_kind("euclid"), ConfigError);
}
