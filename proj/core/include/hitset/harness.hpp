#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hitset/adversary.hpp"
#include "hitset/shmem.hpp"
#include "hitset/value.hpp"

namespace hitset {

enum ExitCode : int {
  kExitPass = 0,
  kExitViolation = 1,
  kExitLiveness = 2,
  kExitConfig = 3,
};

// --- scenarios -------------------------------------------------------------

/// Everything needed to rebuild the process programs of a run.
///
/// protocol: "ca" | "rap" | "doorway" | "hs-ksa" | "wait-min" | "tl" | "bg" | "e2e".
/// For "tl" the inputs are T_L input images; otherwise they are task inputs
/// (bottom marks a process that does not participate).
struct Scenario {
  std::string protocol;
  Adversary adv{1, {ProcessSet::from_bits(1)}};
  std::vector<Value> inputs;
  /// wait-min resilience (also the simulated code's t for "bg").
  int t = 1;
  /// rap: own-step count after which a process becomes a resolver.
  std::map<int, std::int64_t> resolve_after;
  /// bg: number of simulated codes (0 = n).
  int codes = 0;

  [[nodiscard]] int n() const { return adv.n(); }
  [[nodiscard]] nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
};

/// Throws ConfigError for unknown protocols or inconsistent parameters.
std::vector<ProcessProgram> build_programs(const Scenario& scenario);

/// Wait-free adversary on n processes (every singleton is live).
Adversary wait_free_adversary(int n);

// --- schedules -------------------------------------------------------------

/// A seeded crash scenario for a fair schedule.
struct CrashScenario {
  ProcessSet participants;
  ProcessSet correct;
  CrashPlan plan;
  std::uint64_t shuffle_seed = 0;

  [[nodiscard]] FairSchedule schedule() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Samples a correct set among `participants` (containing a live set iff
/// `l_resilient`), a crash slot in [0, length) for every other participant,
/// and a shuffled fair schedule. Deterministic in `seed`. Throws ConfigError
/// when the constraint cannot be met.
CrashScenario random_crash_schedule(std::uint64_t seed, ProcessSet participants, const Adversary& adv,
                                    bool l_resilient, std::int64_t length);

/// Parses an inline JSON schedule or the path of a file holding one:
///   [0, 1, 0, ...]                           fixed pid list
///   {"fair": [0, 1], "participants": [...], "crash": {"2": 5},
///    "crash_on": {"1": "sa-unsafe"}, "crash_after": {"1": 3},
///    "prefix": [...], "seed": 7}             fair schedule
///   {"random": 7}                            seeded random interleaving
/// Throws ConfigError.
std::unique_ptr<Schedule> parse_schedule(const std::string& spec_or_path, int n);

// --- traces ----------------------------------------------------------------

/// JSONL file: a `{"meta": ...}` header line, then one event per line.
void write_trace_file(const std::string& path, const nlohmann::json& meta, const std::vector<TraceEvent>& trace);

struct TraceFile {
  nlohmann::json meta;
  std::vector<TraceEvent> trace;
  /// The event lines exactly as stored.
  std::string events_text;
};

TraceFile read_trace_file(const std::string& path);

struct ReplayResult {
  bool identical = false;
  std::string detail;
  Execution execution;
};

/// Rebuilds the programs from the header's scenario, reruns the recorded
/// pid sequence and compares the regenerated events byte for byte.
ReplayResult replay_trace_file(const std::string& path);

/// Meta header for a run of `scenario`.
nlohmann::json trace_meta(const Scenario& scenario, const std::string& note = {});

// --- suites ----------------------------------------------------------------

struct SuiteParams {
  int n = 3;
  int cases = 100;
  std::uint64_t seed = 1;
  /// "random" or "exhaustive" (ca, rap).
  std::string mode = "random";
  /// as: BatchU budget; tl: distinct T_L inputs.
  int j = 2;
  int positions = 24;
  int moves = 400;
  std::int64_t budget = kDefaultBudget;
  std::optional<Adversary> adv;
  /// e2e: task name.
  std::string task;
  /// Directory for counterexample traces; empty disables writing.
  std::string trace_dir = ".";
};

struct Violation {
  /// "safety" or "liveness".
  std::string kind;
  std::string description;
  std::string trace_path;
};

struct Report {
  std::string suite;
  std::uint64_t cases = 0;
  std::vector<Violation> violations;
  double seconds = 0;
  /// Free-form suite statistics (e.g. max IP count, interleavings).
  nlohmann::json stats = nlohmann::json::object();

  [[nodiscard]] int exit_code() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Suites: ca, rap, doorway, as, hs, tl, bg, e2e. Throws ConfigError on an
/// unknown suite or invalid parameters. Deterministic given the params.
Report run_suite(const std::string& name, const SuiteParams& params);

/// Every minimum hitting set of `sets` within `universe`, by trying all
/// subsets in order of size. Independent of the branch-and-bound solver.
std::vector<ProcessSet> naive_min_hitting_sets(const std::vector<ProcessSet>& sets, ProcessSet universe);

/// Random adversary on n processes with 1..max_sets live sets.
Adversary random_adversary(std::uint64_t seed, int n, int max_sets);

}  // namespace hitset
