#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hitset/machine.hpp"
#include "hitset/process_set.hpp"
#include "hitset/value.hpp"

namespace hitset {

/// Agreed result of a simulated read: the participating codes and, for each
/// of them, how many of its reads had been resolved when the proposer took
/// its snapshot. The read sees every write a code issued before its
/// `counts[d]`-th read.
struct Frontier {
  ProcessSet mask;
  std::vector<int> counts;

  friend bool operator==(const Frontier&, const Frontier&) = default;
};

/// `[mask bits, count_0, ..., count_{n-1}]`.
Value encode_frontier(const Frontier& f);
Frontier decode_frontier(const Value& v, int n);

/// Local replay of n simulated codes from agreed read results.
///
/// Each code runs `code(c, input_c)` once its input is known. Writes are
/// applied to a per-register log stamped with the writer's resolved-read
/// count; reads and snapshots block on the agreed frontier of their
/// position `(c, r)` and are answered from that log. Simulated registers
/// must be single-writer (a second writer raises ProtocolFault), since
/// frontiers only order each code's writes against its own reads.
class SimulatedHistory {
 public:
  /// Input of code c, bottom while c does not participate.
  using InputFn = std::function<Value(int c)>;
  /// Agreed frontier of position (c, r), bottom while undecided.
  using DecisionFn = std::function<Value(int c, int r)>;

  SimulatedHistory(int n, ProtocolFactory code);

  /// Replays every code as far as the known inputs and decisions allow.
  void advance(const InputFn& inputs, const DecisionFn& decisions);

  [[nodiscard]] int n() const { return static_cast<int>(codes_.size()); }
  [[nodiscard]] ProcessSet participating() const;
  [[nodiscard]] bool participates(int c) const { return codes_.at(static_cast<std::size_t>(c)).started; }
  /// Resolved reads of code c, which is also the index of its next position.
  [[nodiscard]] int count(int c) const { return codes_.at(static_cast<std::size_t>(c)).reads; }
  [[nodiscard]] bool terminated(int c) const { return codes_.at(static_cast<std::size_t>(c)).output.has_value(); }
  [[nodiscard]] ProcessSet terminated_set() const;
  [[nodiscard]] const std::optional<Value>& output(int c) const {
    return codes_.at(static_cast<std::size_t>(c)).output;
  }
  /// Frontier of everything replayed so far, the value to propose next.
  [[nodiscard]] Frontier frontier() const;
  /// Total simulated operations executed by all codes.
  [[nodiscard]] std::int64_t simulated_steps() const { return steps_; }

  /// Bound on consecutive local ops (writes, yields) a code may issue
  /// without reading before it is declared divergent.
  static constexpr std::int64_t kMaxLocalRun = 100000;

 private:
  struct Code {
    bool started = false;
    Machine<Value> machine;
    int reads = 0;
    std::optional<Value> output;
  };
  struct Register {
    int owner = -1;
    std::vector<std::pair<int, Value>> writes;  // (stamp, value), stamps ascending
  };

  /// Runs code c until it blocks; true if it made progress.
  bool run_code(int c, const DecisionFn& decisions);
  /// Result of `op` at frontier `f`, or nullopt if a writer has not yet
  /// been replayed far enough.
  std::optional<Value> answer(const MemoryOp& op, const Frontier& f) const;
  [[nodiscard]] Value visible(const Register& reg, const Frontier& f) const;

  ProtocolFactory code_;
  std::vector<Code> codes_;
  std::map<std::string, std::map<int, Register>> memory_;
  std::int64_t steps_ = 0;
};

}  // namespace hitset
