#include <benchmark/benchmark.h>

#include "fwips/fla.hpp"
#include "fwips/rng.hpp"
#include "fwips/synth.hpp"

namespace {

using namespace fwips;

RadioMap benchmark_map(std::size_t rp_count) {
  SynthScene scene = default_scene();
  scene.seed = 99;
  // Pick the lattice that lands closest to the requested size.
  const double area = scene.extent.side(0) * scene.extent.side(1);
  const double grid = area / static_cast<double>(rp_count);
  return generate_orm(scene, scene.extent, grid, 1);
}

void BM_KnnLocate(benchmark::State& state) {
  const RadioMap map = benchmark_map(static_cast<std::size_t>(state.range(0)));
  const std::size_t k = k_upper_bound(map.rp_count());
  Rng rng(5);
  Fingerprint query(map.ap_count());
  for (double& v : query) v = rng.uniform(-90.0, -30.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn_locate(map, query, k));
  }
  state.SetComplexityN(static_cast<benchmark::ComplexityN>(map.rp_count()));
}
BENCHMARK(BM_KnnLocate)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_WknnLocate(benchmark::State& state) {
  const RadioMap map = benchmark_map(static_cast<std::size_t>(state.range(0)));
  const std::size_t k = k_upper_bound(map.rp_count());
  Rng rng(6);
  Fingerprint query(map.ap_count());
  for (double& v : query) v = rng.uniform(-90.0, -30.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wknn_locate(map, query, k));
  }
}
BENCHMARK(BM_WknnLocate)->Range(64, 4096);

}  // namespace
