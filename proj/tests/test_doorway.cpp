#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "hitset/assim.hpp"
#include "hitset/doorway.hpp"
#include "hitset/harness.hpp"
#include "hitset/tasks.hpp"

using namespace hitset;

namespace {

std::vector<ProcessProgram> doorway_programs(const Adversary& adv, const std::vector<Value>& inputs,
                                             const std::shared_ptr<DoorwayProbe>& probe = nullptr) {
  std::vector<ProcessProgram> out;
  for (int p = 0; p < adv.n(); ++p) out.push_back(doorway_program(adv, p, inputs[static_cast<std::size_t>(p)], "dw", probe));
  return out;
}

std::vector<Value> ints(std::initializer_list<int> xs) {
  std::vector<Value> out;
  for (int x : xs) out.push_back(Value::integer(x));
  return out;
}

std::vector<Value> outputs_or_bottom(const Execution& ex) {
  std::vector<Value> out;
  for (const auto& o : ex.outputs) out.push_back(o ? *o : Value{});
  return out;
}

const Adversary kSplit(3, {ProcessSet{0}, ProcessSet{1, 2}});
const Adversary kPairs(4, {ProcessSet{0, 1}, ProcessSet{2, 3}});

}  // namespace

TEST(Doorway, AllParticipateFair) {
  const auto inputs = ints({10, 11, 12});
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    FairSchedule s(ProcessSet{0, 1, 2}, ProcessSet{0, 1, 2}, {}, {}, seed);
    const auto ex = run(doorway_programs(kSplit, inputs), s);
    ASSERT_EQ(ex.status, RunStatus::AllTerminated);
    for (const auto& o : ex.outputs) {
      const auto ids = image_ids(*o);
      EXPECT_TRUE(ids.contains(0) || (ProcessSet{1, 2}).subset_of(ids));
      for (int p : ids.members()) EXPECT_EQ(image_value(*o, p), inputs[static_cast<std::size_t>(p)]);
    }
    EXPECT_TRUE(validate_tl_input(TLTask{k_set_agreement(3, 2), kSplit}, outputs_or_bottom(ex), inputs).ok());
  }
}

TEST(Doorway, OnlyOneTwoParticipate) {
  const auto inputs = ints({10, 11, 12});
  FairSchedule s(ProcessSet{1, 2}, ProcessSet{1, 2}, {});
  const auto ex = run(doorway_programs(kSplit, inputs), s);
  const Value expected = make_image({{1, Value::integer(11)}, {2, Value::integer(12)}});
  EXPECT_EQ(ex.outputs[1], expected);
  EXPECT_EQ(ex.outputs[2], expected);
  EXPECT_FALSE(ex.outputs[0]);
}

TEST(Doorway, SingleLiveSetReturnsEverything) {
  const Adversary whole(3, {ProcessSet{0, 1, 2}});
  const auto inputs = ints({5, 5, 5});
  RandomSchedule s(4);
  const auto ex = run(doorway_programs(whole, inputs), s);
  std::set<Value> distinct;
  for (const auto& o : ex.outputs) {
    EXPECT_EQ(image_ids(*o), (ProcessSet{0, 1, 2}));
    distinct.insert(*o);
  }
  EXPECT_EQ(distinct.size(), 1U);
}

TEST(Doorway, WaitsWithoutLiveSet) {
  FairSchedule s(ProcessSet{0, 2}, ProcessSet{0, 2}, {});
  const auto ex = run(doorway_programs(kPairs, ints({1, 2, 3, 4})), s, 2000);
  EXPECT_EQ(ex.status, RunStatus::Incomplete);
  EXPECT_TRUE(ex.terminated().empty());
}

TEST(Doorway, SequencesCommitOneSetAndProposalsNest) {
  for (const auto& adv : {kPairs, t_resilient_adversary(4, 1), kSplit}) {
    const int n = adv.n();
    std::mt19937_64 rng(static_cast<std::uint64_t>(n) * 31);
    for (int run_index = 0; run_index < 60; ++run_index) {
      auto probe = std::make_shared<DoorwayProbe>();
      std::vector<Value> inputs;
      for (int p = 0; p < n; ++p) inputs.push_back(Value::integer(static_cast<int>(rng() % 3)));
      const auto crash = random_crash_schedule(rng(), ProcessSet::full(n), adv, true, 40L * n);
      auto s = crash.schedule();
      const auto ex = run(doorway_programs(adv, inputs, probe), s);
      ASSERT_TRUE(crash.correct.subset_of(ex.terminated()));

      std::map<int, std::set<std::uint64_t>> committed;
      std::map<int, std::map<int, ProcessSet>> first_proposal;  // pid -> sequence -> set
      for (const auto& e : probe->events) {
        if (e.kind == DoorwayProbe::Kind::CaCommitted) committed[e.sequence].insert(e.set.bits());
        if (e.kind == DoorwayProbe::Kind::Proposed && e.level == 0) first_proposal[e.pid].emplace(e.sequence, e.set);
      }
      for (const auto& [seq, sets] : committed) EXPECT_EQ(sets.size(), 1U) << "sequence " << seq;
      for (const auto& [pid, by_seq] : first_proposal) {
        ProcessSet prev;
        for (const auto& [seq, set] : by_seq) {
          EXPECT_TRUE(prev.subset_of(set));
          prev = set;
        }
      }
    }
  }
}

TEST(Doorway, CascadeOnceOneReturns) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto crash = random_crash_schedule(rng(), ProcessSet::full(4), kPairs, false, 200);
    auto s = crash.schedule();
    const auto ex = run(doorway_programs(kPairs, ints({1, 2, 3, 4})), s, 20000);
    const auto check = validate_tl_input(TLTask{k_set_agreement(4, 2), kPairs}, outputs_or_bottom(ex), ints({1, 2, 3, 4}));
    EXPECT_TRUE(check.ok()) << check.detail;
    if (!ex.terminated().empty()) {
      EXPECT_TRUE(crash.correct.subset_of(ex.terminated()));
    }
  }
}

TEST(Composition, ConsensusWithSingleLiveSet) {
  const Adversary whole(3, {ProcessSet{0, 1, 2}});
  const auto companion = tl_protocol(whole, hs_ksa_protocol(whole), "e2e/tl");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<ProcessProgram> programs;
    const auto inputs = ints({1, 2, 3});
    for (int p = 0; p < 3; ++p) programs.push_back(compose_doorway_then(whole, companion, p, inputs[static_cast<std::size_t>(p)]));
    RandomSchedule s(seed);
    const auto ex = run(programs, s);
    ASSERT_EQ(ex.status, RunStatus::AllTerminated);
    const auto posted = posted_outputs(ex.memory, 3);
    std::set<Value> distinct(posted.begin(), posted.end());
    EXPECT_EQ(distinct.size(), 1U);
    EXPECT_TRUE(k_set_agreement(3, 1).accepts(inputs, posted));
  }
}

TEST(Composition, TwoSetAgreementOverPairs) {
  SuiteParams p;
  p.cases = 40;
  p.trace_dir.clear();
  const auto report = run_suite("e2e", p);
  EXPECT_TRUE(report.violations.empty());
  EXPECT_LE(report.stats["max_distinct_outputs"].get<int>(), 2);
}

TEST(Composition, NonResilientRunsPostNothingInvalid) {
  std::mt19937_64 rng(12);
  const auto companion = tl_protocol(kPairs, hs_ksa_protocol(kPairs), "e2e/tl");
  const auto task = k_set_agreement(4, 2);
  for (int i = 0; i < 60; ++i) {
    const auto inputs = ints({1, 2, 3, 4});
    std::vector<ProcessProgram> programs;
    for (int p = 0; p < 4; ++p) programs.push_back(compose_doorway_then(kPairs, companion, p, inputs[static_cast<std::size_t>(p)]));
    const auto crash = random_crash_schedule(rng(), ProcessSet::full(4), kPairs, false, 300);
    auto s = crash.schedule();
    const auto ex = run(programs, s, 20000);
    std::vector<Value> participating(4);
    for (int p : ex.participants.members()) participating[static_cast<std::size_t>(p)] = inputs[static_cast<std::size_t>(p)];
    EXPECT_TRUE(task.accepts(participating, posted_outputs(ex.memory, 4)));
  }
}
