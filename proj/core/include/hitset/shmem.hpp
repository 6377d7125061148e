#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hitset/machine.hpp"
#include "hitset/process_set.hpp"
#include "hitset/value.hpp"

namespace hitset {

/// Named arrays of atomic registers. Unwritten slots read as bottom.
class SharedMemory {
 public:
  [[nodiscard]] Value read(const std::string& array, int index) const;
  /// Returns the previous content of the slot.
  Value write(const std::string& array, int index, Value value);
  /// `size` slots, or the array's current length when size == 0.
  [[nodiscard]] std::vector<Value> snapshot(const std::string& array, int size) const;

  [[nodiscard]] const std::map<std::string, std::vector<Value>>& arrays() const { return arrays_; }
  [[nodiscard]] std::size_t hash() const;

  friend bool operator==(const SharedMemory&, const SharedMemory&) = default;

 private:
  std::map<std::string, std::vector<Value>> arrays_;
};

struct TraceEvent {
  std::int64_t index = 0;
  int pid = 0;
  /// "read" | "write" | "snapshot" | "yield" | "return"
  std::string op;
  /// "array[i]" for reads and writes, the array name for snapshots.
  std::string reg;
  /// Value written, value read, snapshot vector, or process output.
  Value value;
  std::string phase;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

nlohmann::json trace_event_to_json(const TraceEvent& e);
TraceEvent trace_event_from_json(const nlohmann::json& j);
/// One compact JSON object per line.
std::string trace_to_jsonl(const std::vector<TraceEvent>& trace);
std::vector<TraceEvent> trace_from_jsonl(const std::string& text);
/// The pid sequence that reproduces `trace`.
std::vector<int> schedule_of(const std::vector<TraceEvent>& trace);

enum class RunStatus {
  ScheduleEnd,    // the schedule produced no further ids
  AllTerminated,  // every process returned
  Incomplete,     // step budget exhausted first
};

const char* run_status_name(RunStatus s);

struct Execution {
  std::vector<TraceEvent> trace;
  /// Output of each process that returned.
  std::vector<std::optional<Value>> outputs;
  /// Schedule slots that named an already-terminated process.
  std::vector<std::int64_t> skipped;
  std::vector<std::int64_t> steps_taken;
  /// Processes that took at least one step.
  ProcessSet participants;
  SharedMemory memory;
  RunStatus status = RunStatus::ScheduleEnd;

  [[nodiscard]] bool incomplete() const { return status == RunStatus::Incomplete; }
  [[nodiscard]] ProcessSet terminated() const;
};

/// What a schedule may observe when choosing the next process.
struct ProcessView {
  bool terminated = false;
  std::int64_t steps = 0;
  /// Label of the op the process would execute next ("" when about to return).
  std::string pending_label;
};

struct SchedulerView {
  std::int64_t slot = 0;
  std::vector<ProcessView> processes;
};

/// A sequence of process ids, possibly infinite and possibly reacting to
/// the execution so far. Deterministic given its construction arguments.
class Schedule {
 public:
  virtual ~Schedule() = default;
  virtual std::optional<int> next(const SchedulerView& view) = 0;
};

/// Fixed pid list.
class ListSchedule final : public Schedule {
 public:
  explicit ListSchedule(std::vector<int> pids) : pids_(std::move(pids)) {}
  std::optional<int> next(const SchedulerView& view) override;

 private:
  std::vector<int> pids_;
  std::size_t pos_ = 0;
};

/// Crash plan of a fair schedule. A faulty participant is scheduled only in
/// slots before its crash slot, and additionally stops as soon as its next op
/// carries its crash label (if any), once it has taken at least
/// `label_after_steps` steps. Faulty participants without a crash slot run
/// until their label triggers, or never when they have neither.
struct CrashPlan {
  std::map<int, std::int64_t> crash_slot;
  std::map<int, std::string> crash_label;
  std::map<int, std::int64_t> label_after_steps;
};

/// Round-robin (or seeded random-round) fair schedule over the live
/// processes. Terminated processes are never scheduled; the schedule ends
/// once no scheduled-forever process is left unterminated and every faulty
/// one has crashed or terminated.
class FairSchedule final : public Schedule {
 public:
  FairSchedule(ProcessSet correct, ProcessSet participants, CrashPlan crashes,
               std::vector<int> prefix = {}, std::optional<std::uint64_t> shuffle_seed = std::nullopt);

  std::optional<int> next(const SchedulerView& view) override;

  [[nodiscard]] ProcessSet correct() const { return correct_; }
  [[nodiscard]] ProcessSet participants() const { return participants_; }
  [[nodiscard]] const CrashPlan& crashes() const { return crashes_; }

 private:
  bool alive(int pid, const SchedulerView& view);

  ProcessSet correct_;
  ProcessSet participants_;
  CrashPlan crashes_;
  std::vector<int> prefix_;
  std::size_t prefix_pos_ = 0;
  std::optional<std::mt19937_64> rng_;
  ProcessSet crashed_;
  std::vector<int> round_;
  std::size_t round_pos_ = 0;
};

/// Round-robin over `correct` forever; faulty participants only before
/// their crash slot.
FairSchedule fair_schedule(ProcessSet correct, ProcessSet participants,
                           const std::map<int, std::int64_t>& crash_steps);

/// Seeded uniformly random interleaving of the unterminated processes.
class RandomSchedule final : public Schedule {
 public:
  explicit RandomSchedule(std::uint64_t seed) : rng_(seed) {}
  std::optional<int> next(const SchedulerView& view) override;

 private:
  std::mt19937_64 rng_;
};

/// Called after every executed step.
using StepObserver = std::function<void(const TraceEvent&, const SharedMemory&)>;

/// Step-by-step executor over a fixed set of programs.
class Simulator {
 public:
  explicit Simulator(const std::vector<ProcessProgram>& programs);

  [[nodiscard]] int n() const { return static_cast<int>(procs_.size()); }
  [[nodiscard]] bool terminated(int pid) const;
  [[nodiscard]] bool all_terminated() const;
  [[nodiscard]] SchedulerView view(std::int64_t slot) const;

  /// Executes one step of `pid`. Returns the event, or nullopt when the
  /// process had already terminated (a skip).
  std::optional<TraceEvent> step(int pid);

  [[nodiscard]] const SharedMemory& memory() const { return memory_; }
  [[nodiscard]] std::int64_t events() const { return next_index_; }

  /// Identifies the global state: memory plus each process's result history.
  [[nodiscard]] std::pair<std::uint64_t, std::uint64_t> state_key() const;

  Execution finish(std::vector<TraceEvent> trace, std::vector<std::int64_t> skipped, RunStatus status) const;

 private:
  struct Proc {
    Machine<Value> machine;
    bool terminated = false;
    std::optional<Value> output;
    std::int64_t steps = 0;
    std::uint64_t history = 0x84222325cbf29ce4ULL;
  };

  std::vector<Proc> procs_;
  SharedMemory memory_;
  ProcessSet participants_;
  std::int64_t next_index_ = 0;
};

inline constexpr std::int64_t kDefaultBudget = 100000;

/// Runs `programs` under `schedule` for at most `budget` scheduled slots.
Execution run(const std::vector<ProcessProgram>& programs, Schedule& schedule,
              std::int64_t budget = kDefaultBudget, const StepObserver& observer = {});

struct ExploreOptions {
  /// Maximum number of executed steps along one path.
  std::int64_t depth = 64;
  /// ResourceLimit once more distinct states than this are visited.
  std::int64_t max_states = 2'000'000;
  bool memoize = true;
};

/// Checker over a terminal (all terminated or depth-cut) execution. Returns
/// an empty string when the properties hold, a description otherwise.
using ExecutionChecker = std::function<std::string(const Execution&)>;

struct ExploreReport {
  /// Number of distinct maximal schedules (complete interleavings).
  std::uint64_t interleavings = 0;
  std::uint64_t states = 0;
  std::uint64_t terminal_states = 0;
  std::uint64_t depth_cut_states = 0;
  bool resource_limit = false;
  std::optional<std::string> violation;
  /// Replayable counterexample for the first violation.
  std::optional<Execution> counterexample;
};

/// Enumerates every interleaving of `programs` up to `options.depth` steps,
/// applying `checker` to each terminal state.
ExploreReport explore(const std::vector<ProcessProgram>& programs, const ExploreOptions& options,
                      const ExecutionChecker& checker);

}  // namespace hitset
