#include <doctest.h>

#include <cmath>

#include "mtwlab/c_geometry.hpp"
#include "mtwlab/rng.hpp"

using namespace mtw;

namespace {

GroundSpace unit_box(int d) {
  Vec lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = -1.0;
    hi[i] = 1.0;
  }
  return GroundSpace::box(lo, hi);
}

// eta~ = -d/ds grad_y c(exp_x(s eta), y), an ambient tangent vector at y.
Vec eta_tilde_fd(const CostModel& m, const Vec& x, const Vec& y, const Vec& eta) {
  const double h = 1e-5;
  const Vec gp = grad_y(m, exp_map(m.space(), x, h * eta), y);
  const Vec gm = grad_y(m, exp_map(m.space(), x, -h * eta), y);
  return -(gp - gm) / (2.0 * h);
}

}  // namespace

TEST_CASE("c-segment endpoints and constant segments") {
  const CostModel r = CostModel::reflector(3);
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    const auto [x, y0] = sample_domain_pair(r, 0.3, rng);
    const auto [x2, y1] = sample_domain_pair(r, 0.3, rng);
    (void)x2;
    if (!cost(r, x, y1).is_finite()) continue;
    CHECK(norm(c_segment(r, x, y0, y1, 0.0) - y0) <= 1e-9);
    CHECK(norm(c_segment(r, x, y0, y1, 1.0) - y1) <= 1e-9);
    for (double t : {0.25, 0.5, 0.75}) CHECK(norm(c_segment(r, x, y0, y0, t) - y0) <= 1e-9);
    const Vec p0 = -grad_x(r, x, y0), p1 = -grad_x(r, x, y1);
    const Vec yt = c_segment(r, x, y0, y1, 0.3);
    CHECK(norm(-grad_x(r, x, yt) - (0.7 * p0 + 0.3 * p1)) <= 1e-8);
  }
  const Vec e1{1, 0, 0};
  CHECK_THROWS_AS((void)c_segment(r, e1, e1, -e1, 0.5), DomainError);
}

TEST_CASE("sphere domains are symmetrically c-convex") {
  const ConvexityReport rr = check_c_convexity(CostModel::reflector(3), 0.3, 500, 21, 3);
  CHECK(rr.violations.empty());
  CHECK(rr.max_norm_identity_error <= 1e-9);
  CHECK(rr.max_norm_excess <= 1e-12);
  const ConvexityReport rg = check_c_convexity(CostModel::gauss(3), 0.2, 500, 21, 3);
  CHECK(rg.violations.empty());
}

TEST_CASE("reflector norm identity |p0|^2 = 4/|x-y0|^2 - 1") {
  const CostModel r = CostModel::reflector(3);
  Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    const auto [x, y] = sample_domain_pair(r, 0.1, rng);
    CHECK(std::abs(squared_norm(grad_x(r, x, y)) - (4.0 / squared_norm(x - y) - 1.0)) <= 1e-9 * (1.0 + 4.0 / squared_norm(x - y)));
  }
}

TEST_CASE("flat costs have vanishing MTW tensor") {
  const GroundSpace box = unit_box(3);
  Rng rng(2);
  for (const CostModel& m : {CostModel::quadratic(box), CostModel::neg_inner(box)}) {
    for (int k = 0; k < 20; ++k) {
      const auto [x, y] = sample_domain_pair(m, 0.0, rng);
      const Vec z = random_unit_tangent(box, y, rng), e = random_unit_tangent(box, x, rng);
      CHECK(std::abs(mtw_tensor(m, x, y, z, e)) <= 1e-4);
    }
    const MtwReport rep = verify_mtww(m, 0.0, 200, 20, 4);
    CHECK(rep.mtw_constant_C <= 1e-3);
    CHECK(std::abs(rep.min_tensor_value) <= 1e-3);
  }
}

TEST_CASE("sphere MTW tensors match their closed forms") {
  const CostModel r = CostModel::reflector(3);
  const CostModel g = CostModel::gauss(3);
  Rng rng(12);
  for (int k = 0; k < 50; ++k) {
    {
      const auto [x, y] = sample_domain_pair(r, 0.3, rng);
      const Vec z = random_unit_tangent(r.space(), y, rng), e = random_unit_tangent(r.space(), x, rng);
      const Vec et = eta_tilde_fd(r, x, y, e);
      const double expected = 1.5 * (squared_norm(z) * squared_norm(et) - 2.0 * dot(z, et) * dot(z, et));
      CHECK(mtw_tensor(r, x, y, z, e) == doctest::Approx(expected).epsilon(1e-4).scale(squared_norm(et)));
    }
    {
      const auto [x, y] = sample_domain_pair(g, 0.2, rng);
      const Vec z = random_unit_tangent(g.space(), y, rng), e = random_unit_tangent(g.space(), x, rng);
      const Vec et = eta_tilde_fd(g, x, y, e);
      const double expected = -3.0 * dot(z, et) * dot(z, et);
      CHECK(mtw_tensor(g, x, y, z, e) == doctest::Approx(expected).epsilon(1e-4).scale(squared_norm(et)));
    }
  }
}

TEST_CASE("MTW tensor is nonnegative on orthogonal directions and homogeneous of degree two") {
  const CostModel r = CostModel::reflector(3);
  Rng rng(13);
  for (int k = 0; k < 30; ++k) {
    const auto [x, y] = sample_domain_pair(r, 0.3, rng);
    const Vec e = random_unit_tangent(r.space(), x, rng);
    const Vec et = eta_tilde_fd(r, x, y, e);
    Vec z = random_unit_tangent(r.space(), y, rng);
    z = z - dot(z, et) / squared_norm(et) * et;
    z = z / norm(z);
    const double s0 = mtw_tensor(r, x, y, z, e);
    CHECK(s0 >= -1e-4);
    const double s1 = mtw_tensor(r, x, y, 2.0 * z, e);
    const double s2 = mtw_tensor(r, x, y, z, 3.0 * e);
    CHECK(s1 == doctest::Approx(4.0 * s0).epsilon(1e-3));
    CHECK(s2 == doctest::Approx(9.0 * s0).epsilon(1e-3));
  }
}

TEST_CASE("weak MTW constants of the sphere costs") {
  // Closed forms give min over unit directions of S / |cos| equal to -3/2 (reflector) and -3 (gauss).
  const MtwReport rr = verify_mtww(CostModel::reflector(3), 0.3, 40, 20, 1);
  CHECK(rr.mtw_constant_C == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(rr.violating_pair.has_value());
  const MtwReport rg = verify_mtww(CostModel::gauss(3), 0.2, 40, 20, 1);
  CHECK(rg.mtw_constant_C == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(rr.n_evaluated + rr.n_skipped == 800);
}

TEST_CASE("mtw tensor rejects stencils that leave the domain") {
  const CostModel g = CostModel::gauss(3);
  const Vec x{1, 0, 0};
  const Vec y = normalized(Vec{1e-3, 1, 0});
  const Vec away = normalized(project_tangent(g.space(), y, -x));
  CHECK_THROWS_AS((void)mtw_tensor(g, x, y, away, Vec{0, 1, 0}, 0.5), DomainError);
}
