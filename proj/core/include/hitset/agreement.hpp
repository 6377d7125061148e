#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "hitset/machine.hpp"
#include "hitset/value.hpp"

namespace hitset {

/// Commit-adopt object: registers `<name>/p1[pid]` (phase-1 values) and
/// `<name>/p2[pid]` (phase-2 `[flag, value]` records) for n processes.
struct CAInstance {
  std::string name;
  int n = 0;
};

enum class CAFlag : std::uint8_t { Commit, Adopt };

struct CAOutcome {
  CAFlag flag = CAFlag::Adopt;
  Value value;

  friend bool operator==(const CAOutcome&, const CAOutcome&) = default;
};

/// `[1, v]` for commit, `[0, v]` for adopt.
Value encode(const CAOutcome& outcome);
CAOutcome decode_ca_outcome(const Value& v);

/// Wait-free two-phase commit-adopt, four shared-memory steps.
///
/// Phase 1 writes v and snapshots; the process is "confident" iff every
/// value it saw equals v. Phase 2 writes [confident, v] and snapshots:
/// commit v if every record seen is [1, v]; otherwise adopt the value of a
/// confident record if there is one, else keep v.
Machine<CAOutcome> ca_propose(CAInstance instance, int pid, Value v);

/// Resolver agreement protocol object: decision register `D` plus an
/// embedded commit-adopt instance `<name>/ca`.
struct RAPInstance {
  std::string name;
  int n = 0;
  /// Location of D; defaults to `<name>/D[0]` when `d_array` is empty.
  std::string d_array;
  int d_index = 0;

  [[nodiscard]] std::string decision_array() const { return d_array.empty() ? name + "/D" : d_array; }
  [[nodiscard]] CAInstance ca() const { return CAInstance{name + "/ca", n}; }
};

enum class RAPStatus : std::uint8_t {
  Running,
  /// In the wait loop and the last read of D returned bottom.
  Stuck,
  /// Returned the value found in D.
  Resolved,
  /// Returned its commit-adopt commit.
  Returned,
};

const char* rap_status_name(RAPStatus s);

/// Per-process, per-instance local state of a RAP invocation. Shared between
/// the proposing machine and whoever may call rap_resolve on it.
struct RAPLocal {
  bool resolver = false;
  RAPStatus status = RAPStatus::Running;
  Value returned;
};

/// Propose `v`. Runs commit-adopt; a commit is written to D and returned.
/// Otherwise loops: a resolver writes its estimate to D, then D is read,
/// and a non-bottom D is returned.
Machine<Value> rap_propose(RAPInstance instance, int pid, Value v, std::shared_ptr<RAPLocal> local);

/// A RAP participant that proposes `v` and calls resolve once it has taken
/// `resolve_after` steps of its own (0: before proposing; empty: never).
Machine<Value> rap_process(RAPInstance instance, int pid, Value v, std::optional<std::int64_t> resolve_after);

/// Marks the caller as a resolver of the instance `local` belongs to.
/// Idempotent; takes effect at the next loop iteration.
inline void rap_resolve(RAPLocal& local) { local.resolver = true; }

}  // namespace hitset
