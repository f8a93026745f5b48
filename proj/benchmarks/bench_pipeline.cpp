#include <benchmark/benchmark.h>

#include "clickhomodyne/homodyne.hpp"
#include "clickhomodyne/hbt.hpp"
#include "clickhomodyne/simgen.hpp"
#include "clickhomodyne/timetag.hpp"

using namespace clickhomodyne;

namespace {

constexpr std::uint64_t kSecond = 1'000'000'000'000ULL;

void BM_GeneratePoissonStream(benchmark::State& state) {
  const double rate = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto s = simgen::generate_poisson_stream(rate, kSecond, {1, "lo"});
    benchmark::DoNotOptimize(s.tags.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneratePoissonStream)->Arg(100'000)->Arg(1'000'000)->Arg(10'000'000);

void BM_ApplyDeadTime(benchmark::State& state) {
  const auto in = simgen::generate_poisson_stream(
      static_cast<double>(state.range(0)), kSecond, {2, "lo"});
  for (auto _ : state) {
    auto out = simgen::apply_dead_time(in, 100'000);
    benchmark::DoNotOptimize(out.tags.data());
  }
  state.SetItemsProcessed(state.iterations() * in.tags.size());
}
BENCHMARK(BM_ApplyDeadTime)->Arg(1'000'000)->Arg(10'000'000);

void BM_BinCounts(benchmark::State& state) {
  const auto in = simgen::generate_poisson_stream(2e6, kSecond, {3, "lo"});
  for (auto _ : state) {
    auto binned = timetag::bin_counts(in, 500'000);
    benchmark::DoNotOptimize(binned.counts.data());
  }
  state.SetItemsProcessed(state.iterations() * in.tags.size());
}
BENCHMARK(BM_BinCounts);

void BM_RateNormalizedVariance(benchmark::State& state) {
  const auto a = timetag::bin_counts(
      simgen::generate_poisson_stream(2e6, kSecond, {4, "a"}), 500'000);
  const auto b = timetag::bin_counts(
      simgen::generate_poisson_stream(2e6, kSecond, {4, "b"}), 500'000);
  const auto d = homodyne::difference_series(a, b);
  for (auto _ : state) {
    auto est = homodyne::rate_normalized_variance(d);
    benchmark::DoNotOptimize(est);
  }
  state.SetItemsProcessed(state.iterations() * d.diffs.size());
}
BENCHMARK(BM_RateNormalizedVariance);

void BM_G2AtShift(benchmark::State& state) {
  const auto a = timetag::bin_counts(
      simgen::generate_poisson_stream(2e6, kSecond, {5, "a"}), 500'000);
  const auto b = timetag::bin_counts(
      simgen::generate_poisson_stream(2e6, kSecond, {5, "b"}), 500'000);
  for (auto _ : state) {
    auto est = hbt::g2_at_shift(a, b, 3);
    benchmark::DoNotOptimize(est);
  }
  state.SetItemsProcessed(state.iterations() * a.counts.size());
}
BENCHMARK(BM_G2AtShift);

}  // namespace

BENCHMARK_MAIN();
