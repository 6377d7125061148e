#include <gtest/gtest.h>

#include <random>
#include <set>

#include "hitset/assim.hpp"
#include "hitset/errors.hpp"
#include "hitset/harness.hpp"
#include "hitset/simhistory.hpp"

using namespace hitset;

namespace {

constexpr Color U = Color::U;
constexpr Color IP = Color::IP;
constexpr Color V = Color::V;

ASMove batch(std::vector<int> positions) { return ASMove{ASMove::Kind::BatchU, std::move(positions)}; }
ASMove promote(std::vector<int> positions) { return ASMove{ASMove::Kind::PromoteIP, std::move(positions)}; }

Machine<Value> post_and_collect(int c, Value input) {
  co_await MemoryOp::write("x", c, input, "post");
  Value seen = co_await MemoryOp::snapshot("x", 2, "collect");
  co_return seen;
}

const Adversary kPairs(4, {ProcessSet{0, 1}, ProcessSet{2, 3}});

std::vector<Value> ints(std::initializer_list<int> xs) {
  std::vector<Value> out;
  for (int x : xs) out.push_back(Value::integer(x));
  return out;
}

}  // namespace

TEST(AbstractSim, NextIsFirstUnvisited) {
  EXPECT_EQ(as_next({V, V, U, U}), 2);
  EXPECT_EQ(as_next({V, IP, U}), 2);
  EXPECT_FALSE(as_next({V, IP, V}));
}

TEST(AbstractSim, AccessBeforeStartFaults) {
  auto s = as_initial(4, 1);
  EXPECT_THROW(begin_access(s, 0, s.snapshot()), ProtocolFault);
}

TEST(AbstractSim, SingleSimulatorNeverCreatesIP) {
  auto s = adversary_move(as_initial(6, 1), batch({0, 3}));
  for (int i = 0; i < 4; ++i) s = as_step(s, 0, s.snapshot());
  EXPECT_EQ(s.colors, (std::vector<Color>{V, V, V, V, V, V}));
  EXPECT_EQ(s.ip_count(), 0);
}

TEST(AbstractSim, DivergingProposalsLeaveIP) {
  auto s = adversary_move(as_initial(4, 2), batch({0}));
  const ASView a = s.snapshot();
  s = adversary_move(s, batch({2}));
  const ASView b = s.snapshot();
  const auto first = begin_access(s, 0, a);
  const auto second = begin_access(s, 1, b);
  ASSERT_EQ(first.position, 1);
  ASSERT_EQ(second.position, 1);
  complete_access(s, first);
  EXPECT_EQ(s.colors[1], IP);
  complete_access(s, second);
  EXPECT_EQ(s.colors[1], IP);
  EXPECT_EQ(s.ip_count(), 1);

  s = adversary_move(s, promote({1}));
  EXPECT_EQ(s.colors[1], V);
  EXPECT_THROW(adversary_move(s, promote({3})), ProtocolFault);
}

TEST(AbstractSim, SameProposalsAgree) {
  auto s = adversary_move(as_initial(3, 1), batch({0}));
  const ASView view = s.snapshot();
  const auto first = begin_access(s, 0, view);
  const auto second = begin_access(s, 1, view);
  complete_access(s, second);
  complete_access(s, first);
  EXPECT_EQ(s.colors, (std::vector<Color>{V, V, U}));
}

TEST(AbstractSim, AccessToVisitedIsNoOp) {
  auto s = adversary_move(as_initial(3, 2), batch({0}));
  const ASView stale = s.snapshot();
  s = adversary_move(s, batch({1}));
  const auto access = begin_access(s, 0, stale);
  EXPECT_EQ(access.position, -1);
  complete_access(s, access);
  EXPECT_EQ(s.colors, (std::vector<Color>{V, V, U}));
}

TEST(AbstractSim, BatchRules) {
  auto s = adversary_move(as_initial(4, 2), batch({0, 1}));
  EXPECT_EQ(s.ip_count(), 0);
  s = adversary_move(s, batch({0, 2}));
  EXPECT_EQ(s.colors, (std::vector<Color>{V, V, V, U}));
  EXPECT_THROW(adversary_move(s, batch({3})), ProtocolFault);

  auto t = adversary_move(as_initial(3, 3), batch({0}));
  const ASView a = t.snapshot();
  t = adversary_move(t, batch({2}));
  const auto x = begin_access(t, 0, a);
  const auto y = begin_access(t, 1, t.snapshot());
  complete_access(t, x);
  complete_access(t, y);
  ASSERT_EQ(t.colors[1], IP);
  EXPECT_THROW(adversary_move(t, batch({1})), ProtocolFault);
  EXPECT_THROW(begin_access(t, 0, {V, V, V}), ProtocolFault);
}

TEST(AbstractSim, FuzzBoundPerJ) {
  for (int j = 1; j <= 4; ++j) {
    int max_ip = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      ASFuzzOptions o;
      o.j = j;
      o.seed = seed;
      const auto r = as_fuzz_run(o);
      ASSERT_FALSE(r.violation) << "j=" << j << " seed=" << seed << " " << r.detail;
      EXPECT_LE(r.batches, j);
      max_ip = std::max(max_ip, r.max_ip);
    }
    EXPECT_LE(max_ip, j - 1);
    if (j == 1) {
      EXPECT_EQ(max_ip, 0);
    }
  }
}

TEST(Frontier, EncodeDecode) {
  const Frontier f{ProcessSet{0, 2}, {3, 0, 1}};
  EXPECT_EQ(decode_frontier(encode_frontier(f), 3), f);
  EXPECT_EQ(encode_frontier(f).to_string(), "[5,3,0,1]");
}

TEST(SimulatedHistory, ReadsFollowAgreedFrontier) {
  SimulatedHistory h(2, [](int c, Value v) { return post_and_collect(c, v); });
  const auto inputs = [](int c) { return Value::integer(5 + c); };
  std::map<std::pair<int, int>, Value> decided;
  const auto decisions = [&](int c, int r) {
    auto it = decided.find({c, r});
    return it == decided.end() ? Value{} : it->second;
  };
  h.advance(inputs, decisions);
  EXPECT_EQ(h.participating(), (ProcessSet{0, 1}));
  EXPECT_TRUE(h.terminated_set().empty());
  EXPECT_EQ(h.frontier(), (Frontier{ProcessSet{0, 1}, {0, 0}}));

  decided[{1, 0}] = encode_frontier(Frontier{ProcessSet{1}, {0, 0}});
  h.advance(inputs, decisions);
  EXPECT_EQ(h.output(1), Value::list({Value{}, Value::integer(6)}));
  EXPECT_FALSE(h.terminated(0));

  decided[{0, 0}] = encode_frontier(Frontier{ProcessSet{0, 1}, {0, 0}});
  h.advance(inputs, decisions);
  EXPECT_EQ(h.output(0), Value::list({Value::integer(5), Value::integer(6)}));
  EXPECT_EQ(h.count(0), 1);
}

TEST(SimulateTL, OneDistinctInputNeverBlocks) {
  const auto adv = t_resilient_adversary(4, 2);
  const auto base = ints({1, 2, 3, 4});
  const ImageVector inputs(4, image_of(base, ProcessSet{0, 1, 2, 3}));
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomSchedule s(seed);
    const auto r = simulate_tl(adv, hs_ksa_protocol(adv), inputs, s);
    ASSERT_EQ(r.execution.status, RunStatus::AllTerminated);
    EXPECT_TRUE(r.diagnostics.blocked.empty());
    EXPECT_EQ(r.max_ip, 0);
    EXPECT_FALSE(r.monitor_violation);
    EXPECT_TRUE(validate_tl_output(TLTask{k_set_agreement(4, 2), adv}, inputs, r.outputs).ok());
  }
}

TEST(SimulateTL, TwoInputsWithCrashValidate) {
  const auto base = ints({1, 2, 3, 4});
  const Value small = image_of(base, ProcessSet{0, 1});
  const Value large = image_of(base, ProcessSet{0, 1, 2, 3});
  const ImageVector inputs{small, large, small, large};
  const TLTask tl{k_set_agreement(4, 2), kPairs};
  ASSERT_TRUE(validate_tl_input(tl, inputs, base).ok());
  std::mt19937_64 rng(5);
  for (int i = 0; i < 60; ++i) {
    const int victim = static_cast<int>(rng() % 4);
    const ProcessSet correct = ProcessSet::full(4) - ProcessSet{victim};
    CrashPlan plan;
    plan.crash_slot[victim] = static_cast<std::int64_t>(rng() % 200);
    FairSchedule s(correct, ProcessSet::full(4), plan, {}, rng());
    const auto r = simulate_tl(kPairs, hs_ksa_protocol(kPairs), inputs, s);
    EXPECT_TRUE(correct.subset_of(r.execution.terminated()));
    EXPECT_LE(r.diagnostics.blocked.size(), 1U);
    EXPECT_LE(r.max_ip, 1);
    EXPECT_FALSE(r.monitor_violation);
    ImageVector posted(4);
    for (int p : r.execution.participants.members()) posted[static_cast<std::size_t>(p)] = inputs[static_cast<std::size_t>(p)];
    const auto check = validate_tl_output(tl, posted, r.outputs);
    EXPECT_TRUE(check.ok()) << check.detail;
  }
}

TEST(SimulateTL, SuiteBlocksAtMostJMinusOne) {
  for (int j = 1; j <= 2; ++j) {
    SuiteParams p;
    p.j = j;
    p.cases = 200;
    p.trace_dir.clear();
    const auto report = run_suite("tl", p);
    EXPECT_TRUE(report.violations.empty());
    EXPECT_LE(report.stats["max_blocked"].get<int>(), j - 1);
  }
}
