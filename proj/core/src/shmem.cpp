#include "hitset/shmem.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "hitset/errors.hpp"

namespace hitset {

namespace {

constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t v) {
  std::uint64_t x = seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  x ^= x >> 31;
  x *= 0x7fb5d329728ea185ULL;
  x ^= x >> 27;
  return x;
}

std::uint64_t string_hash(const std::string& s, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

const char* op_name(MemoryOp::Kind kind) {
  switch (kind) {
    case MemoryOp::Kind::Read:
      return "read";
    case MemoryOp::Kind::Write:
      return "write";
    case MemoryOp::Kind::Snapshot:
      return "snapshot";
    case MemoryOp::Kind::Yield:
      return "yield";
  }
  return "?";
}

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::ScheduleEnd:
      return "schedule-end";
    case RunStatus::AllTerminated:
      return "all-terminated";
    case RunStatus::Incomplete:
      return "incomplete";
  }
  return "?";
}

// --- SharedMemory ----------------------------------------------------------

Value SharedMemory::read(const std::string& array, int index) const {
  auto it = arrays_.find(array);
  if (it == arrays_.end() || index < 0 || static_cast<std::size_t>(index) >= it->second.size()) {
    return Value{};
  }
  return it->second[static_cast<std::size_t>(index)];
}

Value SharedMemory::write(const std::string& array, int index, Value value) {
  if (index < 0) throw ProtocolFault("negative register index in " + array);
  auto& slots = arrays_[array];
  if (static_cast<std::size_t>(index) >= slots.size()) slots.resize(static_cast<std::size_t>(index) + 1);
  return std::exchange(slots[static_cast<std::size_t>(index)], std::move(value));
}

std::vector<Value> SharedMemory::snapshot(const std::string& array, int size) const {
  auto it = arrays_.find(array);
  std::vector<Value> out;
  if (it != arrays_.end()) out = it->second;
  if (size > 0) out.resize(static_cast<std::size_t>(size));
  return out;
}

std::size_t SharedMemory::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [name, slots] : arrays_) {
    h = mix64(h, string_hash(name, 0xcbf29ce484222325ULL));
    // Trailing bottoms are not observable; skip them so that equal contents hash equally.
    std::size_t used = slots.size();
    while (used > 0 && slots[used - 1].is_bottom()) --used;
    for (std::size_t i = 0; i < used; ++i) h = mix64(h, slots[i].hash());
    h = mix64(h, used);
  }
  return h;
}

// --- traces ----------------------------------------------------------------

nlohmann::json trace_event_to_json(const TraceEvent& e) {
  nlohmann::json j;
  j["i"] = e.index;
  j["pid"] = e.pid;
  j["op"] = e.op;
  if (!e.reg.empty()) j["reg"] = e.reg;
  j["val"] = e.value.to_json();
  if (!e.phase.empty()) j["phase"] = e.phase;
  return j;
}

TraceEvent trace_event_from_json(const nlohmann::json& j) {
  TraceEvent e;
  e.index = j.at("i").get<std::int64_t>();
  e.pid = j.at("pid").get<int>();
  e.op = j.at("op").get<std::string>();
  if (j.contains("reg")) e.reg = j.at("reg").get<std::string>();
  if (j.contains("val")) e.value = Value::from_json(j.at("val"));
  if (j.contains("phase")) e.phase = j.at("phase").get<std::string>();
  return e;
}

std::string trace_to_jsonl(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const auto& e : trace) {
    out += trace_event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<TraceEvent> trace_from_jsonl(const std::string& text) {
  std::vector<TraceEvent> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line);
    if (!j.contains("i")) continue;  // header lines carry run metadata, not events
    out.push_back(trace_event_from_json(j));
  }
  return out;
}

std::vector<int> schedule_of(const std::vector<TraceEvent>& trace) {
  std::vector<int> pids;
  pids.reserve(trace.size());
  for (const auto& e : trace) pids.push_back(e.pid);
  return pids;
}

ProcessSet Execution::terminated() const {
  ProcessSet out;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i].has_value()) out.insert(static_cast<int>(i));
  }
  return out;
}

// --- schedules -------------------------------------------------------------

std::optional<int> ListSchedule::next(const SchedulerView&) {
  if (pos_ >= pids_.size()) return std::nullopt;
  return pids_[pos_++];
}

FairSchedule::FairSchedule(ProcessSet correct, ProcessSet participants, CrashPlan crashes,
                           std::vector<int> prefix, std::optional<std::uint64_t> shuffle_seed)
    : correct_(correct),
      participants_(participants | correct),
      crashes_(std::move(crashes)),
      prefix_(std::move(prefix)) {
  if (shuffle_seed) rng_.emplace(*shuffle_seed);
}

bool FairSchedule::alive(int pid, const SchedulerView& view) {
  if (pid < 0 || static_cast<std::size_t>(pid) >= view.processes.size()) return false;
  if (!participants_.contains(pid) || crashed_.contains(pid)) return false;
  const auto& p = view.processes[static_cast<std::size_t>(pid)];
  if (p.terminated) return false;
  if (correct_.contains(pid)) return true;
  auto slot = crashes_.crash_slot.find(pid);
  auto label = crashes_.crash_label.find(pid);
  bool crashed = slot == crashes_.crash_slot.end() && label == crashes_.crash_label.end();
  if (slot != crashes_.crash_slot.end() && view.slot >= slot->second) crashed = true;
  if (label != crashes_.crash_label.end() && p.pending_label == label->second) {
    auto after = crashes_.label_after_steps.find(pid);
    if (after == crashes_.label_after_steps.end() || p.steps >= after->second) crashed = true;
  }
  if (crashed) crashed_.insert(pid);
  return !crashed;
}

std::optional<int> FairSchedule::next(const SchedulerView& view) {
  if (prefix_pos_ < prefix_.size()) return prefix_[prefix_pos_++];
  for (int attempt = 0; attempt < 2; ++attempt) {
    while (round_pos_ < round_.size()) {
      int pid = round_[round_pos_++];
      if (alive(pid, view)) return pid;
    }
    round_.clear();
    round_pos_ = 0;
    for (int pid : participants_.members()) {
      if (alive(pid, view)) round_.push_back(pid);
    }
    if (round_.empty()) return std::nullopt;
    if (rng_) std::shuffle(round_.begin(), round_.end(), *rng_);
  }
  return std::nullopt;
}

FairSchedule fair_schedule(ProcessSet correct, ProcessSet participants,
                           const std::map<int, std::int64_t>& crash_steps) {
  CrashPlan plan;
  plan.crash_slot = crash_steps;
  return FairSchedule(correct, participants, std::move(plan));
}

std::optional<int> RandomSchedule::next(const SchedulerView& view) {
  std::vector<int> live;
  for (std::size_t i = 0; i < view.processes.size(); ++i) {
    if (!view.processes[i].terminated) live.push_back(static_cast<int>(i));
  }
  if (live.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
  return live[pick(rng_)];
}

// --- Simulator -------------------------------------------------------------

Simulator::Simulator(const std::vector<ProcessProgram>& programs) {
  procs_.resize(programs.size());
  for (std::size_t i = 0; i < programs.size(); ++i) {
    procs_[i].machine = programs[i]();
    procs_[i].machine.start();
  }
}

bool Simulator::terminated(int pid) const { return procs_.at(static_cast<std::size_t>(pid)).terminated; }

bool Simulator::all_terminated() const {
  return std::all_of(procs_.begin(), procs_.end(), [](const Proc& p) { return p.terminated; });
}

SchedulerView Simulator::view(std::int64_t slot) const {
  SchedulerView v;
  v.slot = slot;
  v.processes.reserve(procs_.size());
  for (const auto& p : procs_) {
    ProcessView pv;
    pv.terminated = p.terminated;
    pv.steps = p.steps;
    if (!p.terminated && !p.machine.done()) pv.pending_label = p.machine.pending().label;
    v.processes.push_back(std::move(pv));
  }
  return v;
}

std::optional<TraceEvent> Simulator::step(int pid) {
  if (pid < 0 || pid >= n()) throw InvalidParameter("scheduled pid out of range: " + std::to_string(pid));
  auto& p = procs_[static_cast<std::size_t>(pid)];
  if (p.terminated) return std::nullopt;
  ++p.steps;
  participants_.insert(pid);

  TraceEvent e;
  e.index = next_index_++;
  e.pid = pid;
  if (p.machine.done()) {
    p.output = p.machine.take();
    p.terminated = true;
    e.op = "return";
    e.value = *p.output;
    p.history = mix64(p.history, 0x72657475726eULL);
    return e;
  }

  const MemoryOp& op = p.machine.pending();
  e.op = op_name(op.kind);
  e.phase = op.label;
  Value result;
  switch (op.kind) {
    case MemoryOp::Kind::Read:
      e.reg = op.array + "[" + std::to_string(op.index) + "]";
      result = memory_.read(op.array, op.index);
      e.value = result;
      break;
    case MemoryOp::Kind::Write: {
      e.reg = op.array + "[" + std::to_string(op.index) + "]";
      e.value = op.value;
      Value previous = memory_.write(op.array, op.index, op.value);
      if (op.write_once && !previous.is_bottom()) {
        throw ProtocolFault("process " + std::to_string(pid) + " wrote " + e.reg + " twice");
      }
      break;
    }
    case MemoryOp::Kind::Snapshot:
      e.reg = op.array;
      result = Value::list(memory_.snapshot(op.array, op.size));
      e.value = result;
      break;
    case MemoryOp::Kind::Yield:
      break;
  }
  p.history = mix64(p.history, result.hash());
  p.machine.feed(std::move(result));
  return e;
}

std::pair<std::uint64_t, std::uint64_t> Simulator::state_key() const {
  const std::uint64_t mem = memory_.hash();
  std::uint64_t a = mix64(0x1234567887654321ULL, mem);
  std::uint64_t b = mix64(0x0fedcba987654321ULL, mem ^ 0x5555555555555555ULL);
  for (const auto& p : procs_) {
    a = mix64(a, p.history);
    a = mix64(a, p.terminated ? 1 : 2);
    b = mix64(b, p.history ^ 0xaaaaaaaaaaaaaaaaULL);
    b = mix64(b, static_cast<std::uint64_t>(p.steps) * 2 + (p.terminated ? 1 : 0));
  }
  return {a, b};
}

Execution Simulator::finish(std::vector<TraceEvent> trace, std::vector<std::int64_t> skipped,
                            RunStatus status) const {
  Execution ex;
  ex.trace = std::move(trace);
  ex.skipped = std::move(skipped);
  ex.status = status;
  ex.memory = memory_;
  ex.participants = participants_;
  for (const auto& p : procs_) {
    ex.outputs.push_back(p.output);
    ex.steps_taken.push_back(p.steps);
  }
  return ex;
}

Execution run(const std::vector<ProcessProgram>& programs, Schedule& schedule, std::int64_t budget,
              const StepObserver& observer) {
  if (budget <= 0) throw InvalidParameter("budget must be positive");
  Simulator sim(programs);
  std::vector<TraceEvent> trace;
  std::vector<std::int64_t> skipped;
  std::int64_t slot = 0;
  RunStatus status = RunStatus::ScheduleEnd;
  while (true) {
    if (sim.all_terminated()) {
      status = RunStatus::AllTerminated;
      break;
    }
    if (slot >= budget) {
      status = RunStatus::Incomplete;
      break;
    }
    auto pid = schedule.next(sim.view(slot));
    if (!pid) break;
    auto event = sim.step(*pid);
    if (event) {
      if (observer) observer(*event, sim.memory());
      trace.push_back(std::move(*event));
    } else {
      skipped.push_back(slot);
    }
    ++slot;
  }
  return sim.finish(std::move(trace), std::move(skipped), status);
}

// --- explore ---------------------------------------------------------------

namespace {

struct KeyHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
    return static_cast<std::size_t>(k.first ^ (k.second * 0x9e3779b97f4a7c15ULL));
  }
};

class Explorer {
 public:
  Explorer(const std::vector<ProcessProgram>& programs, const ExploreOptions& options,
           const ExecutionChecker& checker)
      : programs_(programs), options_(options), checker_(checker) {}

  ExploreReport explore() {
    std::vector<int> prefix;
    report_.interleavings = visit(prefix);
    return std::move(report_);
  }

 private:
  std::uint64_t visit(std::vector<int>& prefix) {
    if (report_.violation || report_.resource_limit) return 0;
    Simulator sim(programs_);
    std::vector<TraceEvent> trace;
    for (int pid : prefix) {
      auto e = sim.step(pid);
      if (e) trace.push_back(std::move(*e));
    }
    const auto key = sim.state_key();
    if (options_.memoize) {
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    ++report_.states;
    if (static_cast<std::int64_t>(report_.states) > options_.max_states) {
      report_.resource_limit = true;
      return 0;
    }

    std::vector<int> enabled;
    for (int pid = 0; pid < sim.n(); ++pid) {
      if (!sim.terminated(pid)) enabled.push_back(pid);
    }
    const bool cut = static_cast<std::int64_t>(prefix.size()) >= options_.depth;
    std::uint64_t total = 0;
    if (enabled.empty() || cut) {
      if (enabled.empty()) {
        ++report_.terminal_states;
      } else {
        ++report_.depth_cut_states;
      }
      auto ex = sim.finish(std::move(trace), {}, enabled.empty() ? RunStatus::AllTerminated : RunStatus::Incomplete);
      std::string problem = checker_ ? checker_(ex) : std::string{};
      if (!problem.empty()) {
        report_.violation = problem;
        report_.counterexample = std::move(ex);
        return 1;
      }
      total = 1;
    } else {
      for (int pid : enabled) {
        prefix.push_back(pid);
        total += visit(prefix);
        prefix.pop_back();
        if (report_.violation || report_.resource_limit) break;
      }
    }
    if (options_.memoize) memo_.emplace(key, total);
    return total;
  }

  const std::vector<ProcessProgram>& programs_;
  const ExploreOptions& options_;
  const ExecutionChecker& checker_;
  ExploreReport report_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t, KeyHash> memo_;
};

}  // namespace

ExploreReport explore(const std::vector<ProcessProgram>& programs, const ExploreOptions& options,
                      const ExecutionChecker& checker) {
  Explorer explorer(programs, options, checker);
  return explorer.explore();
}

}  // namespace hitset
