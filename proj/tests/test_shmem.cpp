#include <gtest/gtest.h>

#include <map>

#include "hitset/errors.hpp"
#include "hitset/shmem.hpp"
#include "oracles.hpp"

using namespace hitset;

namespace {

Machine<Value> write_then_return(std::string reg, int index, Value v) {
  co_await MemoryOp::write(reg, index, v, "w");
  co_return v;
}

Machine<Value> snapshot_then_return(std::string reg, int size) {
  Value s = co_await MemoryOp::snapshot(reg, size, "s");
  co_return s;
}

Machine<Value> write_k_times(int pid, int k) {
  for (int i = 0; i < k; ++i) {
    Value v = Value::integer(i);
    co_await MemoryOp::write("R", pid, v);
  }
  co_return Value::integer(pid);
}

Machine<Value> spin_forever() {
  while (true) co_await MemoryOp::read("R", 0, "spin");
}

Machine<Value> read_register(std::string reg, int index) {
  Value v = co_await MemoryOp::read(reg, index);
  co_return v;
}

std::vector<int> drain(Schedule& s, int n, int limit) {
  std::vector<int> out;
  SchedulerView view;
  view.processes.resize(static_cast<std::size_t>(n));
  for (int slot = 0; slot < limit; ++slot) {
    view.slot = slot;
    auto pid = s.next(view);
    if (!pid) break;
    out.push_back(*pid);
  }
  return out;
}

const Value a = Value::integer(7);

}  // namespace

TEST(Run, WriteThenReturn) {
  std::vector<ProcessProgram> programs{[] { return write_then_return("R", 0, a); }};
  ListSchedule s({0, 0});
  const auto ex = run(programs, s);
  ASSERT_EQ(ex.trace.size(), 2U);
  EXPECT_EQ(ex.trace[0].op, "write");
  EXPECT_EQ(ex.trace[0].reg, "R[0]");
  EXPECT_EQ(ex.trace[1].op, "return");
  EXPECT_EQ(ex.memory.read("R", 0), a);
  EXPECT_EQ(ex.outputs[0], a);
  EXPECT_EQ(ex.status, RunStatus::AllTerminated);
}

TEST(Run, SnapshotIsAtomicPointInSchedule) {
  std::vector<ProcessProgram> programs{[] { return write_then_return("R", 0, a); },
                                       [] { return snapshot_then_return("R", 2); }};
  ListSchedule first({0, 1, 1, 0});
  EXPECT_EQ(*run(programs, first).outputs[1], Value::list({a, Value{}}));
  ListSchedule second({1, 0, 1, 0});
  EXPECT_EQ(*run(programs, second).outputs[1], Value::list({Value{}, Value{}}));
}

TEST(Run, DeterministicAndSkipsRecorded) {
  std::vector<ProcessProgram> programs{[] { return write_k_times(0, 2); }, [] { return write_k_times(1, 1); }};
  ListSchedule s1({0, 1, 1, 1, 0, 0, 1});
  ListSchedule s2({0, 1, 1, 1, 0, 0, 1});
  const auto x = run(programs, s1);
  const auto y = run(programs, s2);
  EXPECT_EQ(x.trace, y.trace);
  EXPECT_EQ(trace_to_jsonl(x.trace), trace_to_jsonl(y.trace));
  // p1 terminates after two steps; slot 3 is a skip, and the run stops once
  // both have returned.
  EXPECT_EQ(x.skipped, (std::vector<std::int64_t>{3}));
  EXPECT_EQ(x.trace.size(), 5U);
}

TEST(Run, BudgetExhaustionIsIncomplete) {
  std::vector<ProcessProgram> programs{[] { return spin_forever(); }};
  RandomSchedule s(1);
  const auto ex = run(programs, s, 50);
  EXPECT_EQ(ex.status, RunStatus::Incomplete);
  EXPECT_EQ(ex.trace.size(), 50U);
  EXPECT_THROW(run(programs, s, 0), InvalidParameter);
}

TEST(Run, ReadsSeeLatestWriteInTraceOrder) {
  std::vector<ProcessProgram> programs;
  for (int p = 0; p < 3; ++p) {
    programs.emplace_back([p] { return write_k_times(p % 2, 3); });
  }
  programs.emplace_back([] { return read_register("R", 0); });
  programs.emplace_back([] { return read_register("R", 1); });
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSchedule s(seed);
    const auto ex = run(programs, s);
    std::map<std::string, Value> last;
    for (const auto& e : ex.trace) {
      if (e.op == "write") last[e.reg] = e.value;
      if (e.op == "read") {
        EXPECT_EQ(e.value, last[e.reg]);
      }
    }
  }
}

TEST(Trace, JsonlRoundTripAndScheduleOf) {
  std::vector<ProcessProgram> programs{[] { return write_then_return("R", 0, a); },
                                       [] { return snapshot_then_return("R", 2); }};
  ListSchedule s({1, 0, 0, 1});
  const auto ex = run(programs, s);
  const auto text = trace_to_jsonl(ex.trace);
  EXPECT_EQ(trace_from_jsonl(text), ex.trace);
  EXPECT_EQ(schedule_of(ex.trace), (std::vector<int>{1, 0, 0, 1}));
  EXPECT_NE(text.find(R"("i":0)"), std::string::npos);
  ListSchedule again(schedule_of(ex.trace));
  EXPECT_EQ(trace_to_jsonl(run(programs, again).trace), text);
}

TEST(FairSchedule, RoundRobinOverCorrect) {
  auto s = fair_schedule(ProcessSet{0, 1}, ProcessSet{0, 1}, {});
  EXPECT_EQ(drain(s, 2, 6), (std::vector<int>{0, 1, 0, 1, 0, 1}));
}

TEST(FairSchedule, FaultyAppearsOnlyBeforeCrash) {
  auto s = fair_schedule(ProcessSet{0, 1}, ProcessSet{0, 1, 2}, {{2, 5}});
  const auto order = drain(s, 3, 30);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == 2) {
      EXPECT_LT(i, 5U);
    }
  }
  // Round-robin over {0,1,2}: p2 gets slot 2 only.
  EXPECT_EQ(std::count(order.begin(), order.end(), 2), 1);
}

TEST(FairSchedule, AllFaultyIsFinite) {
  auto s = fair_schedule(ProcessSet{}, ProcessSet{0}, {{0, 3}});
  EXPECT_EQ(drain(s, 1, 100), (std::vector<int>{0, 0, 0}));
}

TEST(FairSchedule, PrefixThenFairness) {
  FairSchedule s(ProcessSet{1}, ProcessSet{0, 1}, CrashPlan{{{0, 0}}, {}, {}}, {0, 0, 0});
  EXPECT_EQ(drain(s, 2, 6), (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(FairSchedule, LabelCrashWaitsForStepCount) {
  // Process 0 spins on a read labelled "spin"; it is stopped once it has
  // taken 4 steps and sits on that label.
  std::vector<ProcessProgram> programs{[] { return spin_forever(); }, [] { return write_k_times(1, 10); }};
  CrashPlan plan;
  plan.crash_label[0] = "spin";
  plan.label_after_steps[0] = 4;
  FairSchedule s(ProcessSet{1}, ProcessSet{0, 1}, plan);
  const auto ex = run(programs, s);
  EXPECT_EQ(ex.steps_taken[0], 4);
  EXPECT_TRUE(ex.outputs[1].has_value());
}

TEST(Explore, CountsInterleavings) {
  std::vector<ProcessProgram> two{[] { return write_k_times(0, 1); }, [] { return write_k_times(1, 1); }};
  ExploreOptions options;
  options.memoize = false;
  EXPECT_EQ(explore(two, options, {}).interleavings, oracle::multinomial({2, 2}));
  EXPECT_EQ(explore(two, ExploreOptions{}, {}).interleavings, 6U);

  std::vector<ProcessProgram> three{[] { return write_k_times(0, 2); }, [] { return write_k_times(1, 1); },
                                    [] { return write_k_times(2, 0); }};
  const auto expected = oracle::multinomial({3, 2, 1});
  EXPECT_EQ(explore(three, options, {}).interleavings, expected);
  EXPECT_EQ(explore(three, ExploreOptions{}, {}).interleavings, expected);
}

TEST(Explore, CheckerAndCounterexample) {
  std::vector<ProcessProgram> programs{[] { return write_then_return("R", 0, a); },
                                       [] { return snapshot_then_return("R", 1); }};
  const auto ok = explore(programs, ExploreOptions{}, [](const Execution&) { return std::string{}; });
  EXPECT_FALSE(ok.violation);
  EXPECT_EQ(ok.interleavings, oracle::multinomial({2, 2}));

  const auto bad = explore(programs, ExploreOptions{}, [](const Execution& ex) {
    return ex.outputs[1]->at(0).is_bottom() ? std::string{} : std::string("saw the write");
  });
  ASSERT_TRUE(bad.violation);
  ASSERT_TRUE(bad.counterexample);
  EXPECT_FALSE(bad.counterexample->outputs[1]->at(0).is_bottom());
}

TEST(Explore, DepthCutAndStateLimit) {
  std::vector<ProcessProgram> programs{[] { return spin_forever(); }, [] { return spin_forever(); }};
  ExploreOptions options;
  options.depth = 6;
  const auto r = explore(programs, options, {});
  EXPECT_GT(r.depth_cut_states, 0U);
  EXPECT_EQ(r.terminal_states, 0U);
  options.depth = 40;
  options.max_states = 100;
  EXPECT_TRUE(explore(programs, options, {}).resource_limit);
}
