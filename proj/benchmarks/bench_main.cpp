#include <benchmark/benchmark.h>

#include <cmath>

#include "anisolve/capacity.hpp"
#include "anisolve/solver.hpp"

using namespace anisolve;

namespace {

void BM_Resolvent(benchmark::State& state) {
  const MonotoneGraph g = MonotoneGraph::parse("piecewise -2 inf | 0 0.5 | 0 | 1 2 | 1 | 2 0 1");
  double s = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolvent(g, 0.01, s));
    s = s > 4.0 ? -4.0 : s + 0.013;
  }
}
BENCHMARK(BM_Resolvent);

void BM_SolveRegularized(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g({n, n}, {1.0, 1.0}, {1.5, 3.0});
  NodalArray f(g.size(), 0.0);
  for (std::size_t node = 0; node < g.size(); ++node) f[node] = 5.0 * std::sin(4.0 * g.coordinate(node, 0));
  const Problem pb{g, LerayLionsField::model(g), MonotoneGraph::indicator(-0.05, 0.05),
                   MeasureData(g, f, FluxField::zero(g))};
  const MeasureData mu = regularize(pb.mu, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(solve_regularized(pb, mu, 1e-3, std::nullopt).energy);
}
BENCHMARK(BM_SolveRegularized)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

void BM_Capacity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g({n, n}, {1.0, 1.0}, {2.0, 2.0});
  const double centre[2] = {0.5, 0.5};
  const NodeSet set = NodeSet::make(g, {g.nearest_node(centre)});
  for (auto _ : state) benchmark::DoNotOptimize(capacity_compact(g, set));
}
BENCHMARK(BM_Capacity)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
