#include <benchmark/benchmark.h>

#include "mtwlab/applications.hpp"
#include "mtwlab/c_geometry.hpp"
#include "mtwlab/concavity.hpp"
#include "mtwlab/ot_core.hpp"

namespace {

using namespace mtw;

Exec mode(const benchmark::State& state) { return state.range(1) == 0 ? Exec::Serial : Exec::Parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(1) == 0 ? "serial" : "openmp"); }

void BM_CostMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CostModel model = CostModel::reflector(3);
  const PointList X = fibonacci_grid(3, n);
  const PointList Y = uniform_sample(model.space(), n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(cost_matrix(model, X, Y, mode(state)));
  label(state);
}

void BM_CTransform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CostModel model = CostModel::gauss(3);
  const PointList X = fibonacci_grid(3, n);
  const Potential psi = Potential::zero(uniform_sample(model.space(), n, 3));
  for (auto _ : state) benchmark::DoNotOptimize(c_transform(model, psi, X, mode(state)));
  label(state);
}

void BM_Certify(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CostModel model = CostModel::reflector(3);
  const PointList X = fibonacci_grid(3, 2 * n);
  const Potential psi = Potential::zero(uniform_sample(model.space(), n, 5));
  for (auto _ : state) benchmark::DoNotOptimize(certify_strong_c_concavity(model, psi, 0.3, X, 1e-9, mode(state)));
  label(state);
}

void BM_GaussPushforward(benchmark::State& state) {
  const ConvexBody K = ConvexBody::ball(3, 200);
  const PointList normals = fibonacci_grid(3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_pushforward(K, normals, mode(state)));
  label(state);
}

void BM_VerifyMtww(benchmark::State& state) {
  const CostModel model = CostModel::reflector(3);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_mtww(model, 0.3, n, 20, 1, mode(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_CostMatrix)->ArgsProduct({{400, 1600}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CTransform)->ArgsProduct({{400, 1600}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Certify)->ArgsProduct({{50, 100}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussPushforward)->ArgsProduct({{2000, 20000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyMtww)->ArgsProduct({{50, 200}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
