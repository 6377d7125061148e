#include <gtest/gtest.h>

#include <random>
#include <set>

#include "hitset/errors.hpp"
#include "hitset/harness.hpp"
#include "hitset/tasks.hpp"
#include "oracles.hpp"

using namespace hitset;

namespace {

std::vector<Value> ints(std::initializer_list<int> xs) {
  std::vector<Value> out;
  for (int x : xs) out.push_back(x == 0 ? Value{} : Value::integer(x));
  return out;
}

const Adversary kPairs(4, {ProcessSet{0, 1}, ProcessSet{2, 3}});

std::vector<ProcessSet> subsets(int n) {
  std::vector<ProcessSet> out;
  for (std::uint64_t b = 1; b < (std::uint64_t{1} << n); ++b) out.push_back(ProcessSet::from_bits(b));
  return out;
}

}  // namespace

TEST(KSetAgreement, Examples) {
  const auto ksa2 = k_set_agreement(3, 2);
  EXPECT_TRUE(ksa2.accepts(ints({1, 2, 3}), ints({1, 1, 2})));
  EXPECT_FALSE(ksa2.accepts(ints({1, 2, 3}), ints({1, 2, 3})));
  const auto consensus = k_set_agreement(3, 1);
  EXPECT_TRUE(consensus.accepts(ints({1, 2, 3}), ints({2, 2, 0})));
  EXPECT_FALSE(consensus.accepts(ints({1, 2, 3}), ints({2, 1, 0})));
  const auto any = k_set_agreement(3, 3);
  EXPECT_TRUE(any.accepts(ints({1, 2, 3}), ints({3, 1, 2})));
  EXPECT_FALSE(any.accepts(ints({1, 2, 0}), ints({1, 2, 1})));
  EXPECT_FALSE(any.accepts(ints({1, 2, 2}), ints({3, 0, 0})));
  EXPECT_THROW(k_set_agreement(3, 4), InvalidParameter);
}

TEST(KSetAgreement, MatchesDirectPredicate) {
  const std::vector<Value> alphabet{Value{}, Value::integer(1), Value::integer(2), Value::integer(3)};
  for (int k = 1; k <= 3; ++k) {
    const auto task = k_set_agreement(3, k);
    oracle::for_each_vector(3, alphabet, [&](const std::vector<Value>& in) {
      oracle::for_each_vector(3, alphabet, [&](const std::vector<Value>& out) {
        ASSERT_EQ(task.accepts(in, out), oracle::ksa_accepts(in, out, k));
      });
    });
  }
}

TEST(KSetAgreement, TotalAndColorless) {
  const auto task = k_set_agreement(3, 2);
  EXPECT_TRUE(task.is_total());
  EXPECT_TRUE(task.colorless);
  // Sub-sampling accepted outputs keeps them accepted.
  std::mt19937_64 rng(1);
  const std::vector<Value> alphabet{Value{}, Value::integer(1), Value::integer(2), Value::integer(3)};
  oracle::for_each_vector(3, alphabet, [&](const std::vector<Value>& in) {
    oracle::for_each_vector(3, alphabet, [&](const std::vector<Value>& out) {
      if (!task.accepts(in, out)) return;
      std::vector<Value> values;
      for (const auto& v : out) {
        if (!v.is_bottom()) values.push_back(v);
      }
      auto sub = out;
      for (auto& v : sub) {
        if (!v.is_bottom()) v = values[rng() % values.size()];
      }
      EXPECT_TRUE(task.accepts(in, sub));
    });
  });
}

TEST(KSetAgreement, Names) {
  EXPECT_EQ(task_from_name("ksa:2", 4).name, k_set_agreement(4, 2).name);
  EXPECT_TRUE(task_from_name("consensus", 3).accepts(ints({1, 2, 3}), ints({3, 3, 3})));
  EXPECT_THROW(task_from_name("ksa:x", 3), ConfigError);
  EXPECT_THROW(task_from_name("ksa:5", 3), ConfigError);
  EXPECT_THROW(task_from_name("renaming", 3), ConfigError);
}

TEST(Images, Helpers) {
  const Value img = make_image({{2, Value::integer(7)}, {0, Value::integer(5)}});
  EXPECT_EQ(img.to_string(), "[[0,5],[2,7]]");
  EXPECT_EQ(image_ids(img), (ProcessSet{0, 2}));
  EXPECT_EQ(image_value(img, 2), Value::integer(7));
  EXPECT_TRUE(image_value(img, 1).is_bottom());
  EXPECT_EQ(image_of(ints({5, 6, 7}), ProcessSet{0, 2}), img);
}

TEST(TLInput, Examples) {
  const TLTask tl{k_set_agreement(4, 2), kPairs};
  const auto base = ints({1, 2, 3, 4});
  const Value left = image_of(base, ProcessSet{0, 1});
  const Value right = image_of(base, ProcessSet{2, 3});
  EXPECT_TRUE(validate_tl_input(tl, {left, left, left, left}, base).ok());
  EXPECT_TRUE(validate_tl_input(tl, {left, left, right, right}, base).ok());
  const Value wider = image_of(base, ProcessSet{0, 1, 2});
  EXPECT_EQ(validate_tl_input(tl, {left, wider, Value{}, Value{}}, base).reason, TLReason::HittingSetTooSmall);
  EXPECT_EQ(validate_tl_input(tl, {image_of(base, ProcessSet{0, 2}), Value{}, Value{}, Value{}}, base).reason,
            TLReason::WitnessNotLive);
  EXPECT_EQ(validate_tl_input(tl, {image_of(ints({9, 2, 3, 4}), ProcessSet{0, 1}), Value{}, Value{}, Value{}}, base)
                .reason,
            TLReason::InconsistentInput);
  EXPECT_EQ(validate_tl_input(tl, {Value::integer(3), Value{}, Value{}, Value{}}, base).reason,
            TLReason::MalformedEntry);
  EXPECT_TRUE(validate_tl_input(tl, {Value{}, Value{}, Value{}, Value{}}, base).ok());
}

TEST(TLInput, MatchesNaiveCheck) {
  std::mt19937_64 rng(42);
  int accepted = 0;
  int rejected = 0;
  for (int i = 0; i < 400; ++i) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const auto adv = random_adversary(rng(), n, 4);
    std::vector<Value> base;
    for (int p = 0; p < n; ++p) base.push_back(rng() % 4 == 0 ? Value{} : Value::integer(1 + static_cast<int>(rng() % 2)));
    const auto sets = subsets(n);
    std::vector<Value> iprime;
    std::set<Value> distinct;
    ProcessSet all;
    bool naive_ok = true;
    for (int p = 0; p < n; ++p) {
      if (rng() % 3 == 0) {
        iprime.emplace_back();
        continue;
      }
      const auto ids = sets[rng() % sets.size()];
      std::vector<std::pair<int, Value>> pairs;
      for (int q : ids.members()) {
        // Occasionally lie about a value.
        Value v = base[static_cast<std::size_t>(q)];
        if (v.is_bottom() || rng() % 10 == 0) v = Value::integer(5);
        pairs.emplace_back(q, v);
        naive_ok = naive_ok && v == base[static_cast<std::size_t>(q)];
      }
      naive_ok = naive_ok && oracle::l_resilient(adv.live_sets(), ids);
      iprime.push_back(make_image(pairs));
      distinct.insert(iprime.back());
      all = all | ids;
    }
    if (naive_ok && !distinct.empty()) {
      naive_ok = oracle::min_hitting_sets(adv.live_sets(), all).front().size() >= static_cast<int>(distinct.size());
    }
    const auto r = validate_tl_input(TLTask{k_set_agreement(n, 1), adv}, iprime, base);
    ASSERT_EQ(r.ok(), naive_ok) << adv.to_json().dump() << " " << Value::list(iprime).to_string() << " " << r.detail;
    (naive_ok ? accepted : rejected) += 1;
  }
  EXPECT_GT(accepted, 20);
  EXPECT_GT(rejected, 20);
}

TEST(TLOutput, Examples) {
  const Adversary adv(3, {ProcessSet{0, 1}, ProcessSet{2}});
  const TLTask tl{k_set_agreement(3, 1), adv};
  const auto base = ints({1, 2, 3});
  const std::vector<Value> iprime{image_of(base, ProcessSet{0, 1}), image_of(base, ProcessSet{0, 1}), Value{}};
  const Value agreed = make_image({{0, Value::integer(2)}, {1, Value::integer(2)}});
  EXPECT_TRUE(validate_tl_output(tl, iprime, {agreed, Value{}, Value{}}).ok());
  EXPECT_TRUE(validate_tl_output(tl, iprime, {agreed, agreed, Value{}}).ok());
  // A value no participant could have proposed.
  const Value foreign = make_image({{0, Value::integer(3)}, {1, Value::integer(3)}});
  EXPECT_TRUE(validate_tl_output(tl, iprime, {foreign, Value{}, Value{}}).ok());
  const Value split = make_image({{0, Value::integer(1)}, {1, Value::integer(2)}});
  EXPECT_EQ(validate_tl_output(tl, iprime, {split, Value{}, Value{}}).reason, TLReason::NotInDelta);
  EXPECT_EQ(validate_tl_output(tl, iprime, {Value{}, Value{}, Value{}}).reason, TLReason::NoOutput);
  EXPECT_EQ(validate_tl_output(tl, iprime, {make_image({{0, Value::integer(1)}}), Value{}, Value{}}).reason,
            TLReason::WitnessNotLive);
  const Value other = make_image({{0, Value::integer(2)}, {1, Value::integer(1)}});
  EXPECT_EQ(validate_tl_output(tl, iprime, {agreed, other, Value{}}).reason, TLReason::InconsistentOutput);
  EXPECT_EQ(validate_tl_output(tl, iprime, {agreed, Value{}, Value{}}, 0).reason, TLReason::ResourceLimit);
}

TEST(TLOutput, MatchesBruteForceWitnessSearch) {
  std::mt19937_64 rng(99);
  const int n = 3;
  const std::vector<Value> domain{Value::integer(1), Value::integer(2), Value::integer(3)};
  const auto sets = subsets(n);
  int accepted = 0;
  for (int i = 0; i < 300; ++i) {
    const auto adv = random_adversary(rng(), n, 3);
    const int k = 1 + static_cast<int>(rng() % 2);
    const TLTask tl{k_set_agreement(n, k), adv};
    std::vector<Value> base;
    for (int p = 0; p < n; ++p) base.push_back(domain[rng() % domain.size()]);
    std::vector<Value> iprime(n);
    std::vector<Value> oprime(n);
    for (int p = 0; p < n; ++p) {
      if (rng() % 2 == 0) iprime[static_cast<std::size_t>(p)] = image_of(base, sets[rng() % sets.size()]);
      if (rng() % 2 == 0) {
        std::vector<std::pair<int, Value>> pairs;
        for (int q : sets[rng() % sets.size()].members()) pairs.emplace_back(q, domain[rng() % 2]);
        oprime[static_cast<std::size_t>(p)] = make_image(pairs);
      }
    }
    const bool expected = oracle::tl_output_ok(adv.live_sets(), iprime, oprime, domain, domain,
                                               [k](const auto& in, const auto& out) { return oracle::ksa_accepts(in, out, k); });
    const auto r = validate_tl_output(tl, iprime, oprime);
    ASSERT_EQ(r.ok(), expected) << Value::list(iprime).to_string() << " -> " << Value::list(oprime).to_string()
                                << " " << r.detail;
    accepted += expected ? 1 : 0;
  }
  EXPECT_GT(accepted, 10);
}

TEST(WeakSolvability, NeedsParticipatingLiveSet) {
  const auto task = k_set_agreement(4, 2);
  const auto in = ints({1, 2, 3, 4});
  EXPECT_TRUE(weakly_solved(task, kPairs, in, ints({1, 1, 0, 0}), ProcessSet{0, 1, 2, 3}));
  EXPECT_FALSE(weakly_solved(task, kPairs, in, ints({1, 0, 1, 0}), ProcessSet{0, 1, 2, 3}));
  EXPECT_FALSE(weakly_solved(task, kPairs, in, ints({1, 2, 3, 0}), ProcessSet{0, 1, 2, 3}));
}

TEST(HsKsa, OutputsComeFromHittingSet) {
  const auto in = ints({10, 20, 30, 40});
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    std::vector<ProcessProgram> programs;
    for (int p = 0; p < 4; ++p) programs.push_back(hs_ksa_program(kPairs, p, in[static_cast<std::size_t>(p)]));
    const auto crash = random_crash_schedule(rng(), ProcessSet::full(4), kPairs, true, 20);
    auto s = crash.schedule();
    const auto ex = run(programs, s);
    EXPECT_TRUE(crash.correct.subset_of(ex.terminated()));
    std::set<Value> distinct;
    for (const auto& o : ex.outputs) {
      if (!o) continue;
      EXPECT_TRUE(*o == in[0] || *o == in[2]);
      distinct.insert(*o);
    }
    EXPECT_LE(distinct.size(), 2U);
  }
}

TEST(HsKsa, SingleHitterIsConsensus) {
  const Adversary whole(3, {ProcessSet{0, 1, 2}});
  const auto in = ints({4, 5, 6});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<ProcessProgram> programs;
    for (int p = 0; p < 3; ++p) programs.push_back(hs_ksa_program(whole, p, in[static_cast<std::size_t>(p)]));
    RandomSchedule s(seed);
    const auto ex = run(programs, s);
    for (const auto& o : ex.outputs) EXPECT_EQ(o, in[0]);
  }
}

TEST(HsKsa, HittingSetCrashedBeforePosting) {
  const auto in = ints({10, 20, 30, 40});
  std::vector<ProcessProgram> programs;
  for (int p = 0; p < 4; ++p) programs.push_back(hs_ksa_program(kPairs, p, in[static_cast<std::size_t>(p)]));
  FairSchedule s(ProcessSet{1, 3}, ProcessSet{1, 3}, {});
  const auto ex = run(programs, s, 500);
  EXPECT_EQ(ex.status, RunStatus::Incomplete);
  EXPECT_TRUE(ex.terminated().empty());
}

TEST(WaitMin, Examples) {
  const auto in = ints({3, 1, 2});
  auto programs_for = [&](int t) {
    std::vector<ProcessProgram> programs;
    for (int p = 0; p < 3; ++p) programs.push_back(wait_min_program(3, t, p, in[static_cast<std::size_t>(p)]));
    return programs;
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSchedule s(seed);
    for (const auto& o : run(programs_for(0), s).outputs) EXPECT_EQ(o, Value::integer(1));
  }
  // p1 never takes a step.
  const auto example = ints({1, 2, 3});
  std::vector<ProcessProgram> programs;
  for (int p = 0; p < 3; ++p) programs.push_back(wait_min_program(3, 1, p, example[static_cast<std::size_t>(p)]));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    FairSchedule s(ProcessSet{0, 2}, ProcessSet{0, 2}, {}, {}, seed);
    const auto ex = run(programs, s);
    EXPECT_EQ(ex.outputs[0], Value::integer(1));
    EXPECT_EQ(ex.outputs[2], Value::integer(1));
  }
  ListSchedule solo({2, 2, 2});
  EXPECT_EQ(run(programs_for(2), solo).outputs[2], Value::integer(2));
  EXPECT_THROW(wait_min_program(3, 3, 0, Value::integer(1)), InvalidParameter);
}

TEST(WaitMin, AtMostTPlusOneValues) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    const int n = 3 + static_cast<int>(rng() % 3);
    const int t = static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
    std::vector<ProcessProgram> programs;
    for (int p = 0; p < n; ++p) programs.push_back(wait_min_program(n, t, p, Value::integer(static_cast<int>(rng() % 10))));
    const auto crash = random_crash_schedule(rng(), ProcessSet::full(n), t_resilient_adversary(n, t), true, 3L * n);
    auto s = crash.schedule();
    const auto ex = run(programs, s);
    EXPECT_TRUE(crash.correct.subset_of(ex.terminated()));
    std::set<Value> distinct;
    for (const auto& o : ex.outputs) {
      if (o) distinct.insert(*o);
    }
    EXPECT_LE(static_cast<int>(distinct.size()), t + 1);
  }
}
