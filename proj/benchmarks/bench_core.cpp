#include <benchmark/benchmark.h>

#include "pvmincq/dataset.hpp"
#include "pvmincq/matching.hpp"
#include "pvmincq/mincq.hpp"
#include "pvmincq/pipeline.hpp"
#include "pvmincq/validation.hpp"

namespace {

using namespace pvmincq;

LabeledSample moons(std::size_t per_class, std::uint64_t seed) { return generate_moons(per_class, per_class, 0.05, seed); }

UnlabeledSample rotated(std::size_t per_class, std::uint64_t seed, const LabeledSample& ref) {
  return apply_shift(moons(per_class, seed), Rotation{30.0, Eigen::Vector2d(centroid(ref.points()))}).unlabeled();
}

void BM_Solve(benchmark::State& state) {
  const auto per_class = static_cast<std::size_t>(state.range(0));
  const LabeledSample s = moons(per_class, 1);
  const QPInstance qp = assemble(s, VoterSet::build_from_sample(s.points(), 1.0), 1e-2);
  for (auto _ : state) benchmark::DoNotOptimize(solve(qp));
  state.SetLabel("n = " + std::to_string(qp.size()));
}
BENCHMARK(BM_Solve)->Arg(25)->Arg(75)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const LabeledSample s = moons(static_cast<std::size_t>(state.range(0)), 2);
  const VoterSet h = VoterSet::build_from_sample(s.points(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(s, h, 1e-2));
}
BENCHMARK(BM_Assemble)->Arg(75)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_Matching(benchmark::State& state) {
  const auto per_class = static_cast<std::size_t>(state.range(0));
  const LabeledSample s = moons(per_class, 3);
  const UnlabeledSample t = rotated(per_class, 4, s);
  const double probs[] = {0.25};
  const double eps = distance_quantiles(s.points(), t.points(), probs)[0];
  for (auto _ : state) benchmark::DoNotOptimize(compute_matching(s.points(), t.points(), eps));
}
BENCHMARK(BM_Matching)->Arg(50)->Arg(150)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_TrainPvMinCq(benchmark::State& state) {
  const LabeledSample s = moons(150, 5);
  const UnlabeledSample t = rotated(150, 6, s);
  for (auto _ : state) benchmark::DoNotOptimize(train_pv_mincq(s, t, 1.0, 1e-2, 0.3));
}
BENCHMARK(BM_TrainPvMinCq)->Unit(benchmark::kMillisecond);

void BM_PvValidate(benchmark::State& state) {
  const LabeledSample s = moons(150, 7);
  const UnlabeledSample t = rotated(150, 8, s);
  const HyperGrid grid = default_grid(s.points(), t.points());
  for (auto _ : state) benchmark::DoNotOptimize(pv_validate(s, t, grid, 1));
}
BENCHMARK(BM_PvValidate)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
