#include <doctest.h>

#include "mtwlab/applications.hpp"
#include "mtwlab/c_geometry.hpp"
#include "mtwlab/concavity.hpp"
#include "mtwlab/exec.hpp"
#include "mtwlab/ot_core.hpp"

using namespace mtw;

namespace {

const CostModel R = CostModel::reflector(3);
const CostModel G = CostModel::gauss(3);

struct ThreadGuard {
  ~ThreadGuard() { set_thread_count(0); }
};

}  // namespace

TEST_CASE("cost and distance tables") {
  const PointList X = fibonacci_grid(3, 300), Y = uniform_sample(R.space(), 250, 4);
  for (const CostModel& m : {R, G}) {
    const CostMatrix s = cost_matrix(m, X, Y, Exec::Serial), p = cost_matrix(m, X, Y, Exec::Parallel);
    CHECK(s.finite == p.finite);
    CHECK(s.value == p.value);
  }
  CHECK(distance_matrix(R.space(), X, Y, Exec::Serial).value == distance_matrix(R.space(), X, Y, Exec::Parallel).value);
}

TEST_CASE("c-transforms and induced maps") {
  const PointList X = fibonacci_grid(3, 400);
  const Potential psi(uniform_sample(R.space(), 200, 2), std::vector<double>(200, 0.1));
  for (const CostModel& m : {R, G}) {
    const CTransformResult s = c_transform(m, psi, X, Exec::Serial), p = c_transform(m, psi, X, Exec::Parallel);
    CHECK(s.potential.values == p.potential.values);
    CHECK(s.argmin == p.argmin);
    CHECK(s.tie == p.tie);
    const Potential phi(X, std::vector<double>(X.size(), -0.2));
    CHECK(c_transform_back(m, phi, psi.points, Exec::Serial).potential.values ==
          c_transform_back(m, phi, psi.points, Exec::Parallel).potential.values);
    CHECK(induced_map(m, psi, X, Exec::Serial).index == induced_map(m, psi, X, Exec::Parallel).index);
  }
}

TEST_CASE("certificate, proof constants and MTW sweep") {
  const PointList X = fibonacci_grid(3, 200);
  const Potential psi = Potential::zero(uniform_sample(R.space(), 80, 5));
  const ConcavityCertificate s = certify_strong_c_concavity(R, psi, 0.3, X, 1e-9, Exec::Serial);
  const ConcavityCertificate p = certify_strong_c_concavity(R, psi, 0.3, X, 1e-9, Exec::Parallel);
  CHECK(s.strong_constant_C == p.strong_constant_C);
  CHECK(s.n_triples == p.n_triples);
  CHECK(s.is_c_concave == p.is_c_concave);
  const ProofConstants ps = proof_constants(G, 0.3, 200, 1, Exec::Serial);
  const ProofConstants pp = proof_constants(G, 0.3, 200, 1, Exec::Parallel);
  CHECK(ps.C1 == pp.C1);
  CHECK(ps.C2 == pp.C2);
  const MtwReport ms = verify_mtww(R, 0.3, 30, 5, 2, Exec::Serial);
  const MtwReport mp = verify_mtww(R, 0.3, 30, 5, 2, Exec::Parallel);
  CHECK(ms.mtw_constant_C == mp.mtw_constant_C);
  CHECK(ms.min_tensor_value == mp.min_tensor_value);
  CHECK(ms.n_evaluated == mp.n_evaluated);
  const ConvexityReport cs = check_c_convexity(R, 0.3, 100, 11, 3, Exec::Serial);
  const ConvexityReport cp = check_c_convexity(R, 0.3, 100, 11, 3, Exec::Parallel);
  CHECK(cs.max_norm_excess == cp.max_norm_excess);
  CHECK(cs.max_norm_identity_error == cp.max_norm_identity_error);
}

TEST_CASE("results do not depend on the thread count") {
  ThreadGuard guard;
  const PointList X = fibonacci_grid(3, 300);
  const Potential psi = Potential::zero(uniform_sample(G.space(), 150, 8));
  const ConvexBody K = ConvexBody::random_polytope(3, 40, 1, 0.9);
  set_thread_count(1);
  const auto c1 = c_transform(G, psi, X).potential.values;
  const auto g1 = gauss_curvature_measure(K, 3000, 2).weights;
  const auto m1 = verify_mtww(G, 0.3, 20, 4, 1).mtw_constant_C;
  for (int t : {2, 3, 8}) {
    set_thread_count(t);
    CHECK(thread_count() <= t);
    CHECK(c_transform(G, psi, X).potential.values == c1);
    CHECK(gauss_curvature_measure(K, 3000, 2).weights == g1);
    CHECK(verify_mtww(G, 0.3, 20, 4, 1).mtw_constant_C == m1);
  }
}
