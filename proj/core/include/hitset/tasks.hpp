#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hitset/adversary.hpp"
#include "hitset/machine.hpp"
#include "hitset/value.hpp"

namespace hitset {

/// n-vector of task values; bottom marks a non-participant (inputs) or a
/// process without output (outputs).
using TaskVector = std::vector<Value>;

/// A task (I, O, Delta). Input vectors are all vectors over
/// `value_domain` plus bottom with at least one participant; Delta is a
/// membership predicate.
struct TaskSpec {
  std::string name;
  int n = 0;
  bool colorless = false;
  std::vector<Value> value_domain;
  std::function<bool(const TaskVector& input, const TaskVector& output)> delta;

  [[nodiscard]] bool accepts(const TaskVector& input, const TaskVector& output) const { return delta(input, output); }
  /// Values an output entry may take given `input`, bottom first.
  [[nodiscard]] std::vector<Value> output_candidates(const TaskVector& input) const;
  /// Calls `fn` for every input vector until it returns false.
  void for_each_input(const std::function<bool(const TaskVector&)>& fn) const;
  /// Every input vector has an accepted output (checked by enumeration).
  [[nodiscard]] bool is_total() const;
};

/// Outputs are participating inputs, outputs only for participants, at most
/// k distinct outputs. Domain defaults to {1..n}. k = 1 is consensus.
TaskSpec k_set_agreement(int n, int k, std::vector<Value> domain = {});

/// "ksa:K" or "consensus". Throws ConfigError.
TaskSpec task_from_name(const std::string& name, int n);

// --- images ----------------------------------------------------------------

/// Image entry: list of `[pid, value]` pairs in ascending pid order, or bottom.
Value make_image(const std::vector<std::pair<int, Value>>& pairs);
ProcessSet image_ids(const Value& entry);
/// Value paired with `pid` in `entry`, bottom when absent.
Value image_value(const Value& entry, int pid);
/// Image of `x` with respect to `ids`.
Value image_of(const TaskVector& x, ProcessSet ids);

using ImageVector = std::vector<Value>;

// --- T_L validators --------------------------------------------------------

/// The companion task: base task plus adversary.
struct TLTask {
  TaskSpec base;
  Adversary adv;
};

enum class TLReason : std::uint8_t {
  Ok,
  MalformedEntry,     // entry is neither bottom nor a well-formed image
  WitnessNotLive,     // an entry's id set contains no live set
  InconsistentInput,  // entry value differs from the base input
  HittingSetTooSmall, // h(union of witness sets) < number of distinct entries
  NoOutput,           // output image vector is all bottom
  InconsistentOutput, // two output entries disagree on a process's value
  NotInDelta,         // no (I, O) in Delta witnesses the images
  ResourceLimit,
};

const char* tl_reason_name(TLReason r);

struct TLCheck {
  TLReason reason = TLReason::Ok;
  std::string detail;
  [[nodiscard]] bool ok() const { return reason == TLReason::Ok; }
  explicit operator bool() const { return ok(); }
};

/// Input side of the companion task: every non-bottom entry is an image of
/// `base_input` w.r.t. its own id set, each id set contains a live set, and
/// h(union of id sets) >= number of distinct non-bottom entries.
TLCheck validate_tl_input(const TLTask& tl, const ImageVector& iprime, const TaskVector& base_input);

/// Output side: some (I, O) in Delta has `iprime` as an image of I and
/// `oprime` as an image of O, each output id set containing a live set.
/// Search is bounded by `max_candidates` (reason ResourceLimit past it).
TLCheck validate_tl_output(const TLTask& tl, const ImageVector& iprime, const ImageVector& oprime,
                           std::uint64_t max_candidates = 1'000'000);

/// Weak solvability of one execution: the processes with posted outputs
/// contain a live set of participants, and (input, posted) is in Delta.
bool weakly_solved(const TaskSpec& task, const Adversary& adv, const TaskVector& input, const TaskVector& posted,
                   ProcessSet participants);

// --- protocols -------------------------------------------------------------

/// Members of H (the lexicographically first minimum hitting set of
/// (Pi, L)) post their inputs to `<ns>/post`; every process returns the
/// first H-posted value it reads, scanning H in ascending order.
Machine<Value> hs_ksa(Adversary adv, int pid, Value input, std::string ns = "ksa");
ProcessProgram hs_ksa_program(const Adversary& adv, int pid, Value input, std::string ns = "ksa");
ProtocolFactory hs_ksa_protocol(const Adversary& adv, std::string ns = "ksa");

/// Post input to `<ns>/post`, snapshot until n-t values are posted, return
/// the minimum seen. (t+1)-set agreement in t-resilient executions.
Machine<Value> wait_min(int n, int t, int pid, Value input, std::string ns = "wm");
ProcessProgram wait_min_program(int n, int t, int pid, Value input, std::string ns = "wm");
ProtocolFactory wait_min_protocol(int n, int t, std::string ns = "wm");

}  // namespace hitset
