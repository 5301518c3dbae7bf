#include <benchmark/benchmark.h>

#include "msl/nodal_density.hpp"
#include "msl/random.hpp"

namespace {

using namespace msl;

PrunedArrangement random_arrangement(int d, std::size_t n, double rho) {
  Rng rng(7);
  std::vector<HyperplaneFamily> fams;
  for (std::size_t j = 0; j < n; ++j) fams.push_back({UnitVector(uniform_on_sphere(d, rng)), 0.5, 0.01 * j});
  return PrunedArrangement(std::move(fams), rho);
}

void BM_KeptPredicate(benchmark::State& state) {
  const auto set = random_arrangement(2, static_cast<std::size_t>(state.range(0)), 0.01);
  Rng rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<Point> pts(1024);
  for (auto& p : pts) p = {u(rng), u(rng)};
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(set.kept(pts[i++ % pts.size()], 0));
}
BENCHMARK(BM_KeptPredicate)->Arg(100)->Arg(1000);

void BM_CroftonRaw(benchmark::State& state) {
  const auto set = random_arrangement(static_cast<int>(state.range(0)), 20, 0.0);
  const Point c(static_cast<std::size_t>(state.range(0)), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(crofton_estimate(set, c, 30.0).value);
}
BENCHMARK(BM_CroftonRaw)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_BallMeasurePruned2d(benchmark::State& state) {
  const auto set = random_arrangement(2, static_cast<std::size_t>(state.range(0)), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(ball_measure(set, Point{0.0, 0.0}, 5.0).measure.value);
}
BENCHMARK(BM_BallMeasurePruned2d)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
