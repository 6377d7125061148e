#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hitset/adversary.hpp"
#include "hitset/machine.hpp"
#include "hitset/shmem.hpp"
#include "hitset/tasks.hpp"

namespace hitset {

// --- abstract simulation ---------------------------------------------------

enum class Color : std::uint8_t { U, IP, V };

const char* color_name(Color c);

/// Colors of all positions, as seen in one snapshot.
using ASView = std::vector<Color>;

/// First unvisited position of `view`, if any.
std::optional<int> as_next(const ASView& view);

struct ASMove {
  enum class Kind : std::uint8_t { PromoteIP, BatchU };
  Kind kind = Kind::PromoteIP;
  std::vector<int> positions;
};

/// An access that has chosen its position but whose outcome is not fixed.
struct ASAccess {
  int simulator = 0;
  int position = -1;  // -1: the position was already visited, nothing to do
  ASView proposal;
};

struct ASState {
  /// Number of BatchU moves the adversary may make.
  int j = 1;
  std::vector<Color> colors;
  std::vector<ASMove> move_log;
  int batches = 0;
  /// Proposals registered on each position while it was unvisited.
  std::map<int, std::vector<ASView>> proposals;

  [[nodiscard]] bool started() const { return batches > 0; }
  [[nodiscard]] int ip_count() const;
  [[nodiscard]] ASView snapshot() const { return colors; }
};

ASState as_initial(int positions, int j);

/// Goes to next(proposed) and registers the proposal there. Throws
/// ProtocolFault if next(proposed) is not unvisited in `proposed` or the
/// simulation has not started.
ASAccess begin_access(ASState& state, int simulator, const ASView& proposed);

/// Fixes the outcome: an unvisited position becomes V when every proposal
/// registered on it equals this one and IP otherwise; IP and V positions
/// are left unchanged.
void complete_access(ASState& state, const ASAccess& access);

/// begin_access immediately followed by complete_access.
ASState as_step(ASState state, int simulator, const ASView& proposed);

/// PromoteIP turns IP positions into V (unlimited). BatchU turns a set of
/// positions into V, at most j times; V members are left alone and IP
/// members are a fault.
ASState adversary_move(ASState state, const ASMove& move);

struct ASFuzzOptions {
  int j = 1;
  int positions = 24;
  int simulators = 4;
  /// Scheduler events per run.
  int moves = 400;
  std::uint64_t seed = 1;
};

struct ASFuzzResult {
  int max_ip = 0;
  /// Largest IP count ever seen relative to batches made so far.
  bool violation = false;
  std::string detail;
  int batches = 0;
  int promotions = 0;
  int visited = 0;
};

/// One random run: simulators snapshot, begin and complete accesses at
/// random interleavings while the adversary makes at most j BatchU and any
/// number of PromoteIP moves at random points. Checks after every event
/// that the IP count never exceeds (batches so far) - 1.
ASFuzzResult as_fuzz_run(const ASFuzzOptions& options);

// --- simulation of the companion task --------------------------------------

/// Layout of the shared array `<ns>/state`, n simulators:
///   [0, n)         posted T_L inputs
///   [n, 2n)        posted T_L outputs
///   2n + 2p        decision register D of position p = c + n * r
///   2n + 2p + 1    mark set by a simulator that found the RAP of p stuck
struct TLLayout {
  int n = 0;
  std::string ns = "tl";

  [[nodiscard]] std::string state() const { return ns + "/state"; }
  [[nodiscard]] int input_slot(int s) const { return s; }
  [[nodiscard]] int output_slot(int s) const { return n + s; }
  [[nodiscard]] int position(int c, int r) const { return c + n * r; }
  [[nodiscard]] int decision_slot(int c, int r) const { return 2 * n + 2 * position(c, r); }
  [[nodiscard]] int mark_slot(int c, int r) const { return decision_slot(c, r) + 1; }
  [[nodiscard]] std::string rap_name(int c, int r) const {
    return ns + "/rap/" + std::to_string(c) + "/" + std::to_string(r);
  }
};

/// Simulator s of the companion task. Posts `image`, then simulates the
/// participating codes of `base` breadth-first, each simulated read agreed
/// through its own RAP (s resolves the reads of code s). Returns the T_L
/// output image: the outputs of a set of terminated codes containing a live
/// set, either found here and posted or adopted from another simulator.
Machine<Value> tl_simulator(Adversary adv, ProtocolFactory base, int s, Value image, std::string ns = "tl");

/// The simulator as a companion protocol (input image in, output image out).
ProtocolFactory tl_protocol(const Adversary& adv, const ProtocolFactory& base, std::string ns = "tl");

/// Replays the simulated history recorded in a `<ns>/state` snapshot.
struct TLDiagnostics {
  int ip_positions = 0;
  /// Participating, unterminated codes whose next read position is IP.
  std::vector<int> blocked;
  ProcessSet participating;
  ProcessSet terminated;
  std::int64_t decided_positions = 0;
};

TLDiagnostics tl_diagnose(const Adversary& adv, const ProtocolFactory& base, const std::vector<Value>& state,
                          const std::string& ns = "tl");

/// Online check that the IP count stays within (distinct posted inputs) - 1.
class TLMonitor {
 public:
  TLMonitor(int n, std::string ns = "tl");
  void operator()(const TraceEvent& event, const SharedMemory& memory);

  [[nodiscard]] int max_ip() const { return max_ip_; }
  [[nodiscard]] const std::optional<std::string>& violation() const { return violation_; }

 private:
  TLLayout layout_;
  int max_ip_ = 0;
  std::optional<std::string> violation_;
};

struct TLRun {
  Execution execution;
  /// T_L output image returned by each simulator (bottom if none).
  ImageVector outputs;
  TLDiagnostics diagnostics;
  int max_ip = 0;
  std::optional<std::string> monitor_violation;
};

/// One simulator per non-bottom entry of `inputs`; bottom entries get a
/// program that returns at once.
std::vector<ProcessProgram> tl_programs(const Adversary& adv, const ProtocolFactory& base, const ImageVector& inputs,
                                        const std::string& ns = "tl");

/// Runs one simulator per non-bottom entry of `inputs` under `schedule`.
TLRun simulate_tl(const Adversary& adv, const ProtocolFactory& base, const ImageVector& inputs, Schedule& schedule,
                  std::int64_t budget = kDefaultBudget, const std::string& ns = "tl");

}  // namespace hitset
