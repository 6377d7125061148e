#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hitset/adversary.hpp"
#include "hitset/machine.hpp"
#include "hitset/shmem.hpp"
#include "hitset/tasks.hpp"

namespace hitset {

/// Equivalence class of an adversary for colorless tasks: h(Pi, L).
int classify(const Adversary& adv);

/// A correct set of size >= n - (h - 1) that contains no live set, if any.
/// None exists for any adversary; the check enumerates every such set.
std::optional<ProcessSet> converse_counterexample(const Adversary& adv);

// --- safe agreement --------------------------------------------------------

/// Safe agreement object: `<name>[pid]` holds `[level, value]`.
///
/// Propose writes level 1, snapshots, then writes level 0 if someone is
/// already at level 2 and level 2 otherwise. The span from the level-1 write
/// to the level-0/2 write is the unsafe window; its ops carry the labels
/// "sa-enter", "sa-unsafe" and "sa-exit", so a crash plan on "sa-unsafe"
/// stops a process inside it.
struct SafeAgreement {
  std::string name;
  int n = 0;
};

Machine<Value> sa_propose(SafeAgreement sa, int pid, Value v);

/// One snapshot. Returns the value of the lowest-id level-2 record once no
/// record is at level 1, bottom otherwise.
Machine<Value> sa_try_decide(SafeAgreement sa);

/// The decision rule on a snapshot of the records.
Value sa_decision(const std::vector<Value>& records);

/// True if some record is at level 1 (a proposer inside its unsafe window).
bool sa_pending(const std::vector<Value>& records);

// --- BG simulation ---------------------------------------------------------

/// Shared array `<ns>/state`:
///   [0]                    output adopted by every process
///   [1 + c]                agreed input of code c
///   [1 + codes + c + codes * r]  agreed frontier of read r of code c
/// Safe agreement of state slot k lives in `<ns>/sa/k`.
struct BGLayout {
  int codes = 0;
  std::string ns = "bg";

  [[nodiscard]] std::string state() const { return ns + "/state"; }
  [[nodiscard]] int output_slot() const { return 0; }
  [[nodiscard]] int input_slot(int c) const { return 1 + c; }
  [[nodiscard]] int read_slot(int c, int r) const { return 1 + codes + c + codes * r; }
  [[nodiscard]] std::string sa_name(int slot) const { return ns + "/sa/" + std::to_string(slot); }
};

/// Simulator `pid` among n processes: simulates `codes` copies of `code`
/// with safe agreement on every input and read, round-robin over codes and
/// skipping codes whose current agreement is unresolved. Proposes its own
/// input for every code. Returns the output of the lowest-id terminated code
/// and publishes it.
Machine<Value> bg_simulator(int n, int codes, ProtocolFactory code, int pid, Value input, std::string ns = "bg");

/// Non-simulator: waits for the published output and adopts it.
Machine<Value> bg_follower(int pid, std::string ns = "bg");

struct BGRun {
  Execution execution;
  /// Output of each process (bottom if none).
  std::vector<Value> outputs;
  ProcessSet simulators;
  /// Codes whose current agreement still has a proposer in its unsafe window.
  std::vector<int> blocked;
  /// Codes that produced an output in the agreed simulated history.
  ProcessSet terminated_codes;
};

/// Programs of a BG run: members of the lowest minimum hitting set of
/// (Pi, L) with an input simulate, everyone else follows. `codes` defaults
/// to n. The simulators are stored in `*simulators` when given.
std::vector<ProcessProgram> bg_programs(const Adversary& adv, const ProtocolFactory& code, const TaskVector& inputs,
                                        int codes = 0, const std::string& ns = "bg", ProcessSet* simulators = nullptr);

/// The simulators are the lowest minimum hitting set H of (Pi, L) (members
/// with a bottom input only follow); every other participant follows.
/// `codes` defaults to n.
BGRun bg_simulate(const Adversary& adv, const ProtocolFactory& code, const TaskVector& inputs, Schedule& schedule,
                  std::int64_t budget = kDefaultBudget, int codes = 0, const std::string& ns = "bg");

}  // namespace hitset
