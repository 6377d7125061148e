#include <benchmark/benchmark.h>

#include "hitset/assim.hpp"
#include "hitset/bgsim.hpp"
#include "hitset/harness.hpp"
#include "hitset/tasks.hpp"

using namespace hitset;

namespace {

const Adversary kPairs(4, {ProcessSet{0, 1}, ProcessSet{2, 3}});

Scenario scenario(const std::string& protocol, int n) {
  Scenario sc;
  sc.protocol = protocol;
  sc.adv = n == 4 ? kPairs : wait_free_adversary(n);
  for (int p = 0; p < n; ++p) sc.inputs.push_back(Value::integer(p + 1));
  return sc;
}

void run_protocol(benchmark::State& state, const std::string& protocol) {
  const auto sc = scenario(protocol, static_cast<int>(state.range(0)));
  const auto programs = build_programs(sc);
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
  for (auto _ : state) {
    RandomSchedule s(++seed);
    const auto ex = run(programs, s);
    steps += static_cast<std::int64_t>(ex.trace.size());
  }
  state.counters["steps/run"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kAvgIterations);
}

void BM_CommitAdopt(benchmark::State& state) { run_protocol(state, "ca"); }
BENCHMARK(BM_CommitAdopt)->Arg(2)->Arg(5)->Arg(8);

void BM_Doorway(benchmark::State& state) { run_protocol(state, "doorway"); }
BENCHMARK(BM_Doorway)->Arg(4);

void BM_EndToEnd(benchmark::State& state) { run_protocol(state, "e2e"); }
BENCHMARK(BM_EndToEnd)->Arg(4);

void BM_BGSimulation(benchmark::State& state) { run_protocol(state, "bg"); }
BENCHMARK(BM_BGSimulation)->Arg(4);

void BM_SimulateTL(benchmark::State& state) {
  const auto adv = t_resilient_adversary(4, 2);
  std::vector<Value> base;
  for (int p = 0; p < 4; ++p) base.push_back(Value::integer(p + 1));
  const ImageVector inputs{image_of(base, ProcessSet{0, 1}), image_of(base, ProcessSet{0, 1, 2}),
                           image_of(base, ProcessSet::full(4)), image_of(base, ProcessSet{0, 1})};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RandomSchedule s(++seed);
    benchmark::DoNotOptimize(simulate_tl(adv, hs_ksa_protocol(adv), inputs, s));
  }
}
BENCHMARK(BM_SimulateTL);

void BM_ExploreCommitAdopt(benchmark::State& state) {
  const auto programs = build_programs(scenario("ca", static_cast<int>(state.range(0))));
  for (auto _ : state) {
    ExploreOptions options;
    options.depth = 40;
    benchmark::DoNotOptimize(explore(programs, options, {}));
  }
}
BENCHMARK(BM_ExploreCommitAdopt)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ASFuzz(benchmark::State& state) {
  ASFuzzOptions o;
  o.j = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ++o.seed;
    benchmark::DoNotOptimize(as_fuzz_run(o));
  }
}
BENCHMARK(BM_ASFuzz)->DenseRange(1, 4);

}  // namespace
