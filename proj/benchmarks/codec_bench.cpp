#include <benchmark/benchmark.h>

#include <vector>

#include "profilekit/codec.hpp"
#include "profilekit/distribution.hpp"
#include "profilekit/random.hpp"
#include "profilekit/sampling.hpp"

using namespace profilekit;

namespace {

Profile power_law_profile(std::uint64_t n) {
  Rng rng(1);
  return sample_profile(make_power_law(1.2, 100'000), n, rng);
}

// Prior multiplicities of a shuffled stream where symbol s occurs s times.
std::vector<std::uint64_t> staircase(std::uint64_t n) {
  std::vector<std::uint64_t> symbols;
  for (std::uint64_t s = 1; symbols.size() < n; ++s) {
    for (std::uint64_t j = 0; j < s && symbols.size() < n; ++j) symbols.push_back(s);
  }
  Rng rng(2);
  for (std::size_t i = symbols.size(); i > 1; --i) std::swap(symbols[i - 1], symbols[rng.below(i)]);
  std::vector<std::uint64_t> counts(symbols.size() + 2, 0), prior(n);
  for (std::uint64_t t = 0; t < n; ++t) prior[t] = counts[symbols[t]]++;
  return prior;
}

void BM_EncodeBlock(benchmark::State& state) {
  const Profile p = power_law_profile(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encode_block(p));
  state.counters["D"] = static_cast<double>(p.dimension());
}
BENCHMARK(BM_EncodeBlock)->RangeMultiplier(10)->Range(1000, 10'000'000);

void BM_DecodeBlock(benchmark::State& state) {
  const auto bytes = encode_block(power_law_profile(static_cast<std::uint64_t>(state.range(0)))).bytes;
  for (auto _ : state) benchmark::DoNotOptimize(decode_block(bytes));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_DecodeBlock)->RangeMultiplier(10)->Range(1000, 10'000'000);

void BM_SequentialUpdate(benchmark::State& state) {
  const auto prior = staircase(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) {
    SequentialProfileEncoder enc;
    for (std::uint64_t mu : prior) enc.update(mu);
    benchmark::DoNotOptimize(enc.tree().size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * prior.size()));
}
BENCHMARK(BM_SequentialUpdate)->RangeMultiplier(16)->Range(256, 1 << 20);

void BM_SymbolStream(benchmark::State& state) {
  Rng rng(3);
  const auto seq = sample(make_power_law(1.2, 100'000), static_cast<std::uint64_t>(state.range(0)), rng);
  for (auto _ : state) {
    SymbolStreamEncoder<Symbol> enc;
    enc.feed_all(seq);
    benchmark::DoNotOptimize(enc.finalize());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * seq.size()));
}
BENCHMARK(BM_SymbolStream)->RangeMultiplier(10)->Range(1000, 1'000'000);

}  // namespace
