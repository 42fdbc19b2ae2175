#include <benchmark/benchmark.h>

#include "profilekit/distribution.hpp"
#include "profilekit/entropy_proxy.hpp"

using namespace profilekit;

namespace {

void BM_HsPowerLaw(benchmark::State& state) {
  const auto p = make_power_law(1.5, static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hs(p, 1e6));
}
BENCHMARK(BM_HsPowerLaw)->RangeMultiplier(10)->Range(1000, 1'000'000);

void BM_EnPowerLaw(benchmark::State& state) {
  const auto p = make_power_law(1.5, static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(en(p, 1'000'000));
}
BENCHMARK(BM_EnPowerLaw)->RangeMultiplier(10)->Range(1000, 100'000)->Unit(benchmark::kMillisecond);

void BM_EnGaussian(benchmark::State& state) {
  const auto p = discretize(gaussian_model(0.0, static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(en(p, 1'000'000));
}
BENCHMARK(BM_EnGaussian)->RangeMultiplier(10)->Range(10, 10'000)->Unit(benchmark::kMillisecond);

}  // namespace
