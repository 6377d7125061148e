#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hitset/errors.hpp"
#include "hitset/harness.hpp"
#include "oracles.hpp"

using namespace hitset;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("hitset-test-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

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

const Adversary kPairs(4, {ProcessSet{0, 1}, ProcessSet{2, 3}});

Scenario doorway_scenario() {
  Scenario sc;
  sc.protocol = "doorway";
  sc.adv = kPairs;
  for (int p = 0; p < 4; ++p) sc.inputs.push_back(Value::integer(p + 1));
  return sc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Schedules, ParseForms) {
  auto list = parse_schedule("[1, 0, 1]", 2);
  EXPECT_EQ(drain(*list, 2, 10), (std::vector<int>{1, 0, 1}));

  auto fair = parse_schedule(R"({"fair": [0, 1], "participants": [0, 1, 2], "crash": {"2": 0}})", 3);
  EXPECT_EQ(drain(*fair, 3, 4), (std::vector<int>{0, 1, 0, 1}));

  auto a = parse_schedule(R"({"random": 7})", 3);
  auto b = parse_schedule(R"({"random": 7})", 3);
  const auto first = drain(*a, 3, 50);
  EXPECT_EQ(first, drain(*b, 3, 50));
  for (int pid : first) {
    EXPECT_GE(pid, 0);
    EXPECT_LT(pid, 3);
  }

  TempDir dir;
  const auto path = dir.file("s.json");
  std::ofstream(path) << "[2, 2, 0]";
  auto from_file = parse_schedule(path, 3);
  EXPECT_EQ(drain(*from_file, 3, 10), (std::vector<int>{2, 2, 0}));
}

TEST(Schedules, ParseErrors) {
  EXPECT_THROW(parse_schedule("[0, 5]", 2), ConfigError);
  EXPECT_THROW(parse_schedule(R"({"random": "x"})", 2), ConfigError);
  EXPECT_THROW(parse_schedule(R"({"bogus": 1})", 2), ConfigError);
  EXPECT_THROW(parse_schedule("/no/such/schedule.json", 2), ConfigError);
}

TEST(Schedules, RandomCrashRespectsResilience) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto adv = random_adversary(rng(), 2 + static_cast<int>(rng() % 5), 4);
    const bool resilient = rng() % 2 == 0;
    const auto universe = adv.universe();
    CrashScenario c;
    try {
      c = random_crash_schedule(rng(), universe, adv, resilient, 50);
    } catch (const ConfigError&) {
      // Never expected: the empty correct set is always non-resilient.
      FAIL() << adv.to_json().dump();
    }
    EXPECT_EQ(oracle::l_resilient(adv.live_sets(), c.correct), resilient) << adv.to_json().dump();
    EXPECT_TRUE(c.correct.subset_of(universe));
    for (int p : (universe - c.correct).members()) {
      ASSERT_TRUE(c.plan.crash_slot.contains(p));
      EXPECT_LT(c.plan.crash_slot.at(p), 50);
    }
  }
  const auto x = random_crash_schedule(9, ProcessSet::full(4), kPairs, true, 40);
  const auto y = random_crash_schedule(9, ProcessSet::full(4), kPairs, true, 40);
  EXPECT_EQ(x.to_json(), y.to_json());
}

TEST(Scenario, JsonRoundTrip) {
  Scenario sc = doorway_scenario();
  sc.resolve_after[1] = 4;
  sc.codes = 3;
  const auto back = Scenario::from_json(sc.to_json());
  EXPECT_EQ(back.to_json(), sc.to_json());
  EXPECT_THROW(Scenario::from_json(nlohmann::json{{"protocol", "doorway"}}), ConfigError);
  Scenario unknown = sc;
  unknown.protocol = "paxos";
  EXPECT_THROW(build_programs(unknown), ConfigError);
}

TEST(Replay, IdenticalAndTamperDetected) {
  TempDir dir;
  const auto sc = doorway_scenario();
  RandomSchedule s(11);
  const auto ex = run(build_programs(sc), s);
  const auto path = dir.file("run.jsonl");
  write_trace_file(path, trace_meta(sc), ex.trace);

  const auto file = read_trace_file(path);
  EXPECT_EQ(file.trace, ex.trace);
  const auto ok = replay_trace_file(path);
  EXPECT_TRUE(ok.identical) << ok.detail;
  EXPECT_EQ(trace_to_jsonl(ok.execution.trace), file.events_text);

  // Change one written value; the replayed run writes the original.
  std::string text = slurp(path);
  const auto at = text.find(R"("val":1})");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 8, R"("val":9})");
  const auto tampered = dir.file("tampered.jsonl");
  std::ofstream(tampered) << text;
  const auto bad = replay_trace_file(tampered);
  EXPECT_FALSE(bad.identical);
  EXPECT_FALSE(bad.detail.empty());
}

TEST(Replay, EveryProtocol) {
  TempDir dir;
  for (const std::string protocol : {"ca", "rap", "doorway", "hs-ksa", "wait-min", "bg", "e2e"}) {
    Scenario sc = doorway_scenario();
    sc.protocol = protocol;
    RandomSchedule s(5);
    const auto ex = run(build_programs(sc), s, 5000);
    const auto path = dir.file(protocol + ".jsonl");
    write_trace_file(path, trace_meta(sc), ex.trace);
    const auto r = replay_trace_file(path);
    EXPECT_TRUE(r.identical) << protocol << ": " << r.detail;
  }
}

TEST(Reports, ExitCodes) {
  Report r;
  EXPECT_EQ(r.exit_code(), kExitPass);
  r.violations.push_back({"liveness", "stuck", ""});
  EXPECT_EQ(r.exit_code(), kExitLiveness);
  r.violations.push_back({"safety", "split", ""});
  EXPECT_EQ(r.exit_code(), kExitViolation);
  EXPECT_EQ(r.to_json()["exit_code"], 1);
}

TEST(Suites, UnknownAndBadParams) {
  SuiteParams p;
  p.trace_dir.clear();
  EXPECT_THROW(run_suite("nope", p), ConfigError);
  p.j = 9;
  EXPECT_THROW(run_suite("tl", p), ConfigError);
}

TEST(Suites, HittingSetAgainstNaive) {
  SuiteParams p;
  p.n = 10;
  p.cases = 200;
  p.seed = 7;
  p.trace_dir.clear();
  const auto report = run_suite("hs", p);
  EXPECT_EQ(report.cases, 200U);
  EXPECT_TRUE(report.violations.empty());
}

TEST(Suites, Deterministic) {
  SuiteParams p;
  p.cases = 30;
  p.trace_dir.clear();
  for (const std::string name : {"doorway", "tl", "bg", "e2e"}) {
    auto a = run_suite(name, p).stats;
    auto b = run_suite(name, p).stats;
    EXPECT_EQ(a, b) << name;
  }
}

TEST(Suites, NaiveHittingSetsMatchOracle) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto adv = random_adversary(rng(), n, 5);
    EXPECT_EQ(naive_min_hitting_sets(adv.live_sets(), adv.universe()),
              oracle::min_hitting_sets(adv.live_sets(), adv.universe()));
  }
}
