#include "hitset/bgsim.hpp"

#include <set>

#include "hitset/errors.hpp"
#include "hitset/simhistory.hpp"

namespace hitset {

int classify(const Adversary& adv) { return hitting_set_size(adv, adv.universe()); }

std::optional<ProcessSet> converse_counterexample(const Adversary& adv) {
  const int n = adv.n();
  if (n > 20) throw InvalidParameter("converse check enumerates subsets; n must be <= 20");
  const int h = classify(adv);
  const int least = n - (h - 1);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const ProcessSet correct = ProcessSet::from_bits(bits);
    if (correct.size() >= least && !is_l_resilient(adv, correct)) return correct;
  }
  return std::nullopt;
}

// --- safe agreement --------------------------------------------------------

namespace {

int level_of(const Value& record) { return record.is_bottom() ? 0 : static_cast<int>(record.at(0).as_int()); }

}  // namespace

Value sa_decision(const std::vector<Value>& records) {
  if (sa_pending(records)) return Value{};
  for (const auto& rec : records) {
    if (level_of(rec) == 2) return rec.at(1);
  }
  return Value{};
}

bool sa_pending(const std::vector<Value>& records) {
  for (const auto& rec : records) {
    if (level_of(rec) == 1) return true;
  }
  return false;
}

Machine<Value> sa_propose(SafeAgreement sa, int pid, Value v) {
  if (v.is_bottom()) throw ProtocolFault("safe agreement proposal must not be bottom");
  Value entering = Value::list({Value::integer(1), v});
  co_await MemoryOp::write(sa.name, pid, entering, "sa-enter");
  Value records = co_await MemoryOp::snapshot(sa.name, sa.n, "sa-unsafe");
  bool someone_decided = false;
  for (const auto& rec : records.items()) someone_decided = someone_decided || level_of(rec) == 2;
  Value leaving = Value::list({Value::integer(someone_decided ? 0 : 2), v});
  co_await MemoryOp::write(sa.name, pid, leaving, "sa-exit");
  co_return Value{};
}

Machine<Value> sa_try_decide(SafeAgreement sa) {
  Value records = co_await MemoryOp::snapshot(sa.name, sa.n, "sa-decide");
  std::vector<Value> items(records.items().begin(), records.items().end());
  co_return sa_decision(items);
}

// --- BG simulation ---------------------------------------------------------

namespace {

Value slot_of(const Value& snap, int i) {
  return static_cast<std::size_t>(i) < snap.items().size() ? snap.at(static_cast<std::size_t>(i)) : Value{};
}

template <class SlotFn>
void replay(SimulatedHistory& history, const BGLayout& layout, const SlotFn& slot) {
  history.advance([&](int c) { return slot(layout.input_slot(c)); },
                  [&](int c, int r) { return slot(layout.read_slot(c, r)); });
}

/// State slot that code c is currently waiting on, or -1 once it terminated.
int current_slot(const SimulatedHistory& history, const BGLayout& layout, int c) {
  if (!history.participates(c)) return layout.input_slot(c);
  if (history.terminated(c)) return -1;
  return layout.read_slot(c, history.count(c));
}

}  // namespace

Machine<Value> bg_simulator(int n, int codes, ProtocolFactory code, int pid, Value input, std::string ns) {
  const BGLayout layout{codes, ns};
  const std::string state = layout.state();
  SimulatedHistory history(codes, code);
  std::set<int> proposed;
  int last = codes - 1;

  while (true) {
    Value snap = co_await MemoryOp::snapshot(state, 0, "bg-scan");
    Value adopted = slot_of(snap, layout.output_slot());
    if (!adopted.is_bottom()) co_return adopted;

    replay(history, layout, [&](int i) { return slot_of(snap, i); });
    const ProcessSet done = history.terminated_set();
    if (!done.empty()) {
      Value out = *history.output(done.members().front());
      co_await MemoryOp::write(state, layout.output_slot(), out, "bg-output");
      co_return out;
    }

    for (int k = 1; k <= codes; ++k) {
      const int c = (last + k) % codes;
      const int slot = current_slot(history, layout, c);
      if (slot < 0 || !slot_of(snap, slot).is_bottom()) continue;
      const SafeAgreement sa{layout.sa_name(slot), n};
      if (!proposed.contains(slot)) {
        Value value = history.participates(c) ? encode_frontier(history.frontier()) : input;
        auto proposing = sa_propose(sa, pid, value);
        co_await std::move(proposing);
        proposed.insert(slot);
      }
      auto deciding = sa_try_decide(sa);
      Value decided = co_await std::move(deciding);
      if (decided.is_bottom()) continue;
      co_await MemoryOp::write(state, slot, decided, "bg-decide");
      last = c;
      break;
    }
  }
}

Machine<Value> bg_follower(int pid, std::string ns) {
  (void)pid;
  const BGLayout layout{0, ns};
  const std::string state = layout.state();
  while (true) {
    Value out = co_await MemoryOp::read(state, layout.output_slot(), "bg-wait");
    if (!out.is_bottom()) co_return out;
  }
}

std::vector<ProcessProgram> bg_programs(const Adversary& adv, const ProtocolFactory& code, const TaskVector& inputs,
                                        int codes, const std::string& ns, ProcessSet* simulators) {
  const int n = adv.n();
  if (inputs.size() != static_cast<std::size_t>(n)) throw InvalidParameter("need one input per process");
  if (codes <= 0) codes = n;
  const ProcessSet hitters = resolver_set_for(adv, adv.universe());
  std::vector<ProcessProgram> programs;
  for (int p = 0; p < n; ++p) {
    const Value input = inputs[static_cast<std::size_t>(p)];
    if (hitters.contains(p) && !input.is_bottom()) {
      if (simulators != nullptr) simulators->insert(p);
      programs.emplace_back([n, codes, code, p, input, ns]() { return bg_simulator(n, codes, code, p, input, ns); });
    } else {
      programs.emplace_back([p, ns]() { return bg_follower(p, ns); });
    }
  }
  return programs;
}

BGRun bg_simulate(const Adversary& adv, const ProtocolFactory& code, const TaskVector& inputs, Schedule& schedule,
                  std::int64_t budget, int codes, const std::string& ns) {
  const int n = adv.n();
  if (codes <= 0) codes = n;
  BGRun out;
  const auto programs = bg_programs(adv, code, inputs, codes, ns, &out.simulators);
  out.execution = run(programs, schedule, budget);
  out.outputs.assign(static_cast<std::size_t>(n), Value{});
  for (int p = 0; p < n; ++p) {
    const auto& o = out.execution.outputs[static_cast<std::size_t>(p)];
    if (o) out.outputs[static_cast<std::size_t>(p)] = *o;
  }

  const BGLayout layout{codes, ns};
  const auto& memory = out.execution.memory;
  const auto state = memory.snapshot(layout.state(), 0);
  SimulatedHistory history(codes, code);
  replay(history, layout, [&](int i) {
    return static_cast<std::size_t>(i) < state.size() ? state[static_cast<std::size_t>(i)] : Value{};
  });
  out.terminated_codes = history.terminated_set();
  for (int c = 0; c < codes; ++c) {
    const int slot = current_slot(history, layout, c);
    if (slot < 0) continue;
    if (sa_pending(memory.snapshot(layout.sa_name(slot), n))) out.blocked.push_back(c);
  }
  return out;
}

}  // namespace hitset
