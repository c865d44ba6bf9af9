// Serial vs parallel timings of the element loops: norms, quasi-interpolation,
// assembly. Run with --benchmark_filter=... to pick one.
#include <benchmark/benchmark.h>

#include "muckfem/execution.hpp"
#include "muckfem/fem.hpp"
#include "muckfem/interp.hpp"
#include "muckfem/quadrature.hpp"

using namespace muckfem;

namespace {

Execution execOf(const benchmark::State& s) { return s.range(1) ? Execution::Parallel : Execution::Serial; }

const Mesh& meshOf(int n) {
  static std::map<int, Mesh> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Mesh::buildSimplicial(Domain::unitSquare(), std::sqrt(2.0) / n)).first;
  return it->second;
}

void BM_WeightedNorm(benchmark::State& state) {
  const Mesh& mesh = meshOf(static_cast<int>(state.range(0)));
  const Weight w = Weight::power(2, {0.5, 0.5}, 0.5);
  const QuadratureRule rule = buildRule(mesh, w, 4);
  const Field f = toField(functions::sinProduct());
  for (auto _ : state) benchmark::DoNotOptimize(weightedSeminorm(f, 2.0, 1, mesh, rule, nullptr, execOf(state)));
  state.SetItemsProcessed(state.iterations() * mesh.numElements());
}

void BM_QuasiInterpolation(benchmark::State& state) {
  const Mesh& mesh = meshOf(static_cast<int>(state.range(0)));
  FESpace V(mesh, 1);
  QuasiInterpolant Pi(V);
  const SmoothFunction v = functions::sinProduct();
  for (auto _ : state) benchmark::DoNotOptimize(Pi.apply(v, execOf(state)).coefficients().data());
  state.SetItemsProcessed(state.iterations() * V.numDofs());
}

void BM_Assembly(benchmark::State& state) {
  const Mesh& mesh = meshOf(static_cast<int>(state.range(0)));
  FESpace V(mesh, 1);
  EllipticProblem prob;
  prob.space = &V;
  prob.omega = Weight::power(2, {0.5, 0.5}, 0.5);
  prob.load = EllipticProblem::Load::Source;
  prob.source = SmoothFunction::constant(2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(prob, execOf(state)).A.nonZeros());
  state.SetItemsProcessed(state.iterations() * mesh.numElements());
}

}  // namespace

BENCHMARK(BM_WeightedNorm)->ArgsProduct({{32, 128}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuasiInterpolation)->ArgsProduct({{16, 64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Assembly)->ArgsProduct({{32, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
