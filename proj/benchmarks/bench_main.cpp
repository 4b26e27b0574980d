#include <benchmark/benchmark.h>

#include "blochdeck/bloch.hpp"
#include "blochdeck/schulman.hpp"

using namespace blochdeck;

namespace {

CoveringGraph klein_graph(long m, long R) {
  return CoveringGraph::build(GroupSpec::klein_bottle(), {m, 1.0, R});
}

void BM_klein_fourier(benchmark::State& state) {
  long M = state.range(0);
  auto spec = GroupSpec::klein_bottle();
  auto grid = DualGrid::build(spec, M);
  GroupFunction f(spec);
  for (const auto& s : enumerate_ball(spec, 3)) f.set(s, Complex(0.3, -0.1));
  for (auto _ : state) {
    auto fhat = fourier(f, grid);
    benchmark::DoNotOptimize(fhat.values.data());
  }
}
BENCHMARK(BM_klein_fourier)->Arg(8)->Arg(16)->Arg(32);

void BM_dual_grid_build(benchmark::State& state) {
  auto spec = GroupSpec::klein_bottle();
  for (auto _ : state) {
    auto grid = DualGrid::build(spec, state.range(0));
    benchmark::DoNotOptimize(grid.size());
  }
}
BENCHMARK(BM_dual_grid_build)->Arg(16)->Arg(64);

void BM_heat_kernel_dense(benchmark::State& state) {
  auto g = CoveringGraph::build(GroupSpec::free_abelian(1),
                                {state.range(0), 1.0, 4});
  auto H = assemble_invariant(g, std::vector<double>(g.base_count(), 0.0));
  for (auto _ : state) {
    auto K = heat_kernel(H, 0.1);
    benchmark::DoNotOptimize(K.raw().data());
  }
}
BENCHMARK(BM_heat_kernel_dense)->Arg(8)->Arg(16)->Arg(32);

void BM_heat_kernel_columns(benchmark::State& state) {
  auto g = klein_graph(state.range(0), 4);
  auto H = assemble_invariant(g, std::vector<double>(g.base_count(), 0.0));
  std::vector<VertexId> cols;
  for (long b = 0; b < g.base_count(); ++b)
    cols.push_back(g.vertex(g.identity_copy(), b));
  for (auto _ : state) {
    auto K = heat_kernel_columns(H, 0.2, cols);
    benchmark::DoNotOptimize(K.raw().data());
  }
}
BENCHMARK(BM_heat_kernel_columns)->Arg(4)->Arg(8);

void BM_bloch_transform(benchmark::State& state) {
  auto g = klein_graph(4, 3);
  auto grid = DualGrid::build(g.group(), state.range(0));
  auto f = random_interior(g, 1, 7);
  for (auto _ : state) {
    auto field = bloch_transform(g, grid, f);
    benchmark::DoNotOptimize(field.node_values.data());
  }
}
BENCHMARK(BM_bloch_transform)->Arg(8)->Arg(16);

void BM_image_summer(benchmark::State& state) {
  auto g = klein_graph(4, state.range(0));
  auto H = assemble_invariant(g, std::vector<double>(g.base_count(), 0.0));
  auto K = heat_kernel(H, 0.2);
  Irrep rep = irrep_at(g.group(), {0.9, 1.7});
  ImageSummer summer(K, g, rep, state.range(0));
  for (auto _ : state) {
    for (long x = 0; x < g.base_count(); ++x)
      for (long y = 0; y < g.base_count(); ++y)
        benchmark::DoNotOptimize(summer.at(x, y).value.data());
  }
}
BENCHMARK(BM_image_summer)->Arg(2)->Arg(4);

void BM_twisted_assembly(benchmark::State& state) {
  auto g = klein_graph(state.range(0), 3);
  std::vector<double> V(g.base_count(), 0.0);
  Irrep rep = irrep_at(g.group(), {1.1, 0.4});
  for (auto _ : state) {
    auto HL = assemble_twisted(g, V, rep);
    benchmark::DoNotOptimize(HL.matrix().data());
  }
}
BENCHMARK(BM_twisted_assembly)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
