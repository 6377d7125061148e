#include <benchmark/benchmark.h>

#include <vector>

#include "hitset/adversary.hpp"
#include "hitset/harness.hpp"

namespace {

std::vector<hitset::Adversary> sample(int n, int count) {
  std::vector<hitset::Adversary> out;
  for (int i = 0; i < count; ++i) out.push_back(hitset::random_adversary(static_cast<std::uint64_t>(i) + 1, n, 12));
  return out;
}

void BM_MinHittingSets(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto advs = sample(n, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& adv = advs[i++ % advs.size()];
    benchmark::DoNotOptimize(hitset::min_hitting_sets(adv, adv.universe()));
  }
}
BENCHMARK(BM_MinHittingSets)->Arg(6)->Arg(10)->Arg(14)->Arg(18);

// Baseline: subset enumeration.
void BM_NaiveHittingSets(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto advs = sample(n, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& adv = advs[i++ % advs.size()];
    benchmark::DoNotOptimize(hitset::naive_min_hitting_sets(adv.live_sets(), adv.universe()));
  }
}
BENCHMARK(BM_NaiveHittingSets)->Arg(6)->Arg(10)->Arg(14);

void BM_TResilientH(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto adv = hitset::t_resilient_adversary(n, n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(hitset::hitting_set_size(adv, adv.universe()));
}
BENCHMARK(BM_TResilientH)->Arg(6)->Arg(10)->Arg(12);

}  // namespace
