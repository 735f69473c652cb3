// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "geoflow/kernels.hpp"

namespace k = geoflow::kernels;

namespace {

struct Grid {
  int n;
  std::vector<double> cx, cy, u, v, w, out, gx, gy;
  explicit Grid(int n_) : n(n_) {
    const std::size_t m = static_cast<std::size_t>(n) * n;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(0.5, 1.5);
    for (auto* vec : {&cx, &cy, &u, &v, &w}) {
      vec->resize(m);
      for (auto& x : *vec) x = U(rng);
    }
    out.resize(m);
    gx.resize(m);
    gy.resize(m);
  }
};

template <bool Parallel>
void BM_Divergence2D(benchmark::State& state) {
  Grid g(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel) k::parallel::divergence_2d(g.n, g.cx, g.cy, g.u, g.out);
    else k::serial::divergence_2d(g.n, g.cx, g.cy, g.u, g.out);
    benchmark::DoNotOptimize(g.out.data());
  }
  state.SetItemsProcessed(state.iterations() * g.u.size());
}

template <bool Parallel>
void BM_EdgeForm2D(benchmark::State& state) {
  Grid g(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    double r = Parallel ? k::parallel::edge_form_2d(g.n, g.cx, g.cy, g.u, g.v)
                        : k::serial::edge_form_2d(g.n, g.cx, g.cy, g.u, g.v);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * g.u.size());
}

template <bool Parallel>
void BM_WeightedDot(benchmark::State& state) {
  Grid g(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    double r = Parallel ? k::parallel::weighted_dot(g.u, g.v, g.w) : k::serial::weighted_dot(g.u, g.v, g.w);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * g.u.size());
}

template <bool Parallel>
void BM_Gradient2D(benchmark::State& state) {
  Grid g(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel) k::parallel::centered_gradient_2d(g.n, g.u, g.gx, g.gy);
    else k::serial::centered_gradient_2d(g.n, g.u, g.gx, g.gy);
    benchmark::DoNotOptimize(g.gx.data());
  }
  state.SetItemsProcessed(state.iterations() * g.u.size());
}

}  // namespace

#define GRID_SIZES RangeMultiplier(2)->Range(128, 1024)
BENCHMARK(BM_Divergence2D<false>)->Name("divergence_2d/serial")->GRID_SIZES;
BENCHMARK(BM_Divergence2D<true>)->Name("divergence_2d/parallel")->GRID_SIZES;
BENCHMARK(BM_EdgeForm2D<false>)->Name("edge_form_2d/serial")->GRID_SIZES;
BENCHMARK(BM_EdgeForm2D<true>)->Name("edge_form_2d/parallel")->GRID_SIZES;
BENCHMARK(BM_WeightedDot<false>)->Name("weighted_dot/serial")->GRID_SIZES;
BENCHMARK(BM_WeightedDot<true>)->Name("weighted_dot/parallel")->GRID_SIZES;
BENCHMARK(BM_Gradient2D<false>)->Name("centered_gradient_2d/serial")->GRID_SIZES;
BENCHMARK(BM_Gradient2D<true>)->Name("centered_gradient_2d/parallel")->GRID_SIZES;

BENCHMARK_MAIN();
