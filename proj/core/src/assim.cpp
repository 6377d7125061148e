#include "hitset/assim.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "hitset/agreement.hpp"
#include "hitset/errors.hpp"
#include "hitset/simhistory.hpp"

namespace hitset {

// --- abstract simulation ---------------------------------------------------

const char* color_name(Color c) {
  switch (c) {
    case Color::U:
      return "U";
    case Color::IP:
      return "IP";
    case Color::V:
      return "V";
  }
  return "?";
}

std::optional<int> as_next(const ASView& view) {
  auto it = std::find(view.begin(), view.end(), Color::U);
  if (it == view.end()) return std::nullopt;
  return static_cast<int>(it - view.begin());
}

int ASState::ip_count() const { return static_cast<int>(std::count(colors.begin(), colors.end(), Color::IP)); }

ASState as_initial(int positions, int j) {
  if (positions < 1) throw InvalidParameter("AS needs at least one position");
  if (j < 1) throw InvalidParameter("AS needs j >= 1");
  ASState s;
  s.j = j;
  s.colors.assign(static_cast<std::size_t>(positions), Color::U);
  return s;
}

ASAccess begin_access(ASState& state, int simulator, const ASView& proposed) {
  if (!state.started()) throw ProtocolFault("access before the simulation started");
  if (proposed.size() != state.colors.size()) throw ProtocolFault("proposal has the wrong number of positions");
  auto target = as_next(proposed);
  if (!target) throw ProtocolFault("proposed state has no unvisited position");
  ASAccess access{simulator, *target, proposed};
  const Color now = state.colors[static_cast<std::size_t>(*target)];
  if (now == Color::V) {
    access.position = -1;
    return access;
  }
  if (now == Color::U) state.proposals[*target].push_back(proposed);
  return access;
}

void complete_access(ASState& state, const ASAccess& access) {
  if (access.position < 0) return;
  auto& color = state.colors.at(static_cast<std::size_t>(access.position));
  if (color != Color::U) return;
  const auto& seen = state.proposals[access.position];
  const bool unanimous =
      std::all_of(seen.begin(), seen.end(), [&](const ASView& v) { return v == access.proposal; });
  color = unanimous ? Color::V : Color::IP;
  if (unanimous) state.proposals.erase(access.position);
}

ASState as_step(ASState state, int simulator, const ASView& proposed) {
  ASAccess access = begin_access(state, simulator, proposed);
  complete_access(state, access);
  return state;
}

ASState adversary_move(ASState state, const ASMove& move) {
  if (move.kind == ASMove::Kind::PromoteIP) {
    for (int p : move.positions) {
      auto& color = state.colors.at(static_cast<std::size_t>(p));
      if (color != Color::IP) throw ProtocolFault("PromoteIP on a " + std::string(color_name(color)) + " position");
      color = Color::V;
      state.proposals.erase(p);
    }
  } else {
    if (state.batches >= state.j) throw ProtocolFault("more than j batch moves");
    for (int p : move.positions) {
      auto& color = state.colors.at(static_cast<std::size_t>(p));
      if (color == Color::IP) throw ProtocolFault("BatchU on an IP position");
      color = Color::V;
      state.proposals.erase(p);
    }
    ++state.batches;
  }
  state.move_log.push_back(move);
  return state;
}

ASFuzzResult as_fuzz_run(const ASFuzzOptions& o) {
  if (o.simulators < 1) throw InvalidParameter("AS fuzz needs a simulator");
  std::mt19937_64 rng(o.seed);
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };
  auto pick = [&](std::size_t bound) { return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng); };

  enum class Phase : std::uint8_t { Idle, Snapped, Begun };
  struct Sim {
    Phase phase = Phase::Idle;
    ASView view;
    ASAccess access;
  };
  std::vector<Sim> sims(static_cast<std::size_t>(o.simulators));
  ASState state = as_initial(o.positions, o.j);
  ASFuzzResult result;

  // Batch points are spread over the run; the first starts the simulation.
  std::vector<int> batch_at;
  batch_at.push_back(static_cast<int>(pick(static_cast<std::size_t>(std::max(1, o.moves / 8)))));
  for (int b = 1; b < o.j; ++b) batch_at.push_back(static_cast<int>(pick(static_cast<std::size_t>(o.moves))));
  std::sort(batch_at.begin(), batch_at.end());

  for (int event = 0; event < o.moves; ++event) {
    const bool batch_due =
        state.batches < o.j && event >= batch_at[static_cast<std::size_t>(state.batches)];
    if (batch_due) {
      ASMove move{ASMove::Kind::BatchU, {}};
      for (int p = 0; p < o.positions; ++p) {
        if (state.colors[static_cast<std::size_t>(p)] == Color::U && chance(0.15)) move.positions.push_back(p);
      }
      state = adversary_move(std::move(state), move);
      ++result.batches;
    } else if (state.ip_count() > 0 && chance(0.1)) {
      std::vector<int> ips;
      for (int p = 0; p < o.positions; ++p) {
        if (state.colors[static_cast<std::size_t>(p)] == Color::IP) ips.push_back(p);
      }
      state = adversary_move(std::move(state), ASMove{ASMove::Kind::PromoteIP, {ips[pick(ips.size())]}});
      ++result.promotions;
    } else if (state.started()) {
      auto& sim = sims[pick(sims.size())];
      const int id = static_cast<int>(&sim - sims.data());
      switch (sim.phase) {
        case Phase::Idle:
          sim.view = state.snapshot();
          if (as_next(sim.view)) sim.phase = Phase::Snapped;
          break;
        case Phase::Snapped:
          sim.access = begin_access(state, id, sim.view);
          sim.phase = Phase::Begun;
          break;
        case Phase::Begun:
          complete_access(state, sim.access);
          sim.phase = Phase::Idle;
          break;
      }
    }
    const int ip = state.ip_count();
    result.max_ip = std::max(result.max_ip, ip);
    if (ip > std::max(state.batches - 1, 0) && !result.violation) {
      result.violation = true;
      result.detail = "event " + std::to_string(event) + ": " + std::to_string(ip) + " IP positions after " +
                      std::to_string(state.batches) + " batches";
    }
  }
  result.visited = static_cast<int>(std::count(state.colors.begin(), state.colors.end(), Color::V));
  return result;
}

// --- simulation of the companion task --------------------------------------

namespace {

Value slot_of(const Value& snap, int i) {
  return static_cast<std::size_t>(i) < snap.items().size() ? snap.at(static_cast<std::size_t>(i)) : Value{};
}

Value slot_of(const std::vector<Value>& snap, int i) {
  return static_cast<std::size_t>(i) < snap.size() ? snap[static_cast<std::size_t>(i)] : Value{};
}

template <class Snap>
void replay(SimulatedHistory& history, const TLLayout& layout, const Snap& snap) {
  const int n = layout.n;
  history.advance(
      [&](int c) {
        for (int s = 0; s < n; ++s) {
          Value v = image_value(slot_of(snap, layout.input_slot(s)), c);
          if (!v.is_bottom()) return v;
        }
        return Value{};
      },
      [&](int c, int r) { return slot_of(snap, layout.decision_slot(c, r)); });
}

template <class Snap>
bool in_progress(const Snap& snap, const TLLayout& layout, int c, int r) {
  return !slot_of(snap, layout.mark_slot(c, r)).is_bottom() && slot_of(snap, layout.decision_slot(c, r)).is_bottom();
}

}  // namespace

Machine<Value> tl_simulator(Adversary adv, ProtocolFactory base, int s, Value image, std::string ns) {
  const int n = adv.n();
  const TLLayout layout{n, ns};
  const std::string state = layout.state();
  co_await MemoryOp::write_once_op(state, layout.input_slot(s), image, "tl-post");

  SimulatedHistory history(n, base);
  while (true) {
    Value snap = co_await MemoryOp::snapshot(state, 0, "tl-scan");
    for (int t = 0; t < n; ++t) {
      Value posted = slot_of(snap, layout.output_slot(t));
      if (!posted.is_bottom()) co_return posted;
    }

    replay(history, layout, snap);
    const ProcessSet done = history.terminated_set();
    if (adv.contains_live_set(done)) {
      std::vector<std::pair<int, Value>> pairs;
      for (int c : done.members()) pairs.emplace_back(c, *history.output(c));
      Value out = make_image(pairs);
      co_await MemoryOp::write(state, layout.output_slot(s), out, "tl-output");
      co_return out;
    }

    // Breadth-first: the unterminated participating code with the fewest
    // resolved reads, skipping positions someone found stuck. Our own code
    // comes first when its position is stuck, since only we resolve it.
    std::optional<std::pair<int, int>> next;
    for (int c : history.participating().members()) {
      if (history.terminated(c)) continue;
      const int r = history.count(c);
      if (!slot_of(snap, layout.decision_slot(c, r)).is_bottom()) continue;
      if (in_progress(snap, layout, c, r)) {
        if (c != s) continue;
        next = {r, c};
        break;
      }
      if (!next || std::make_pair(r, c) < *next) next = {r, c};
    }
    if (!next) continue;

    const auto [r, c] = *next;
    RAPInstance rap{layout.rap_name(c, r), n, state, layout.decision_slot(c, r)};
    auto local = std::make_shared<RAPLocal>();
    if (c == s) rap_resolve(*local);
    Value proposal = encode_frontier(history.frontier());
    Machine<Value> agreement = rap_propose(rap, s, proposal, local);
    agreement.start();
    while (!agreement.done()) {
      MemoryOp op = agreement.pending();
      Value result = co_await std::move(op);
      agreement.feed(std::move(result));
      if (local->status == RAPStatus::Stuck) {
        co_await MemoryOp::write(state, layout.mark_slot(c, r), Value::integer(1), "tl-mark");
        break;
      }
    }
  }
}

ProtocolFactory tl_protocol(const Adversary& adv, const ProtocolFactory& base, std::string ns) {
  return [adv, base, ns](int s, Value image) { return tl_simulator(adv, base, s, std::move(image), ns); };
}

TLDiagnostics tl_diagnose(const Adversary& adv, const ProtocolFactory& base, const std::vector<Value>& state,
                          const std::string& ns) {
  const TLLayout layout{adv.n(), ns};
  SimulatedHistory history(adv.n(), base);
  replay(history, layout, state);
  TLDiagnostics d;
  d.participating = history.participating();
  d.terminated = history.terminated_set();
  for (std::size_t i = static_cast<std::size_t>(2 * layout.n); i < state.size(); i += 2) {
    const Value decision = slot_of(state, static_cast<int>(i));
    if (!decision.is_bottom()) {
      ++d.decided_positions;
    } else if (!slot_of(state, static_cast<int>(i) + 1).is_bottom()) {
      ++d.ip_positions;
    }
  }
  for (int c : d.participating.members()) {
    if (!history.terminated(c) && in_progress(state, layout, c, history.count(c))) d.blocked.push_back(c);
  }
  return d;
}

TLMonitor::TLMonitor(int n, std::string ns) : layout_{n, std::move(ns)} {}

void TLMonitor::operator()(const TraceEvent& event, const SharedMemory& memory) {
  if (event.op != "write" || event.reg.rfind(layout_.state() + "[", 0) != 0) return;
  const auto state = memory.snapshot(layout_.state(), 0);
  std::set<Value> inputs;
  for (int s = 0; s < layout_.n; ++s) {
    Value v = slot_of(state, layout_.input_slot(s));
    if (!v.is_bottom()) inputs.insert(v);
  }
  int ip = 0;
  for (std::size_t i = static_cast<std::size_t>(2 * layout_.n); i + 1 < state.size(); i += 2) {
    if (state[i].is_bottom() && !state[i + 1].is_bottom()) ++ip;
  }
  max_ip_ = std::max(max_ip_, ip);
  const int bound = std::max(static_cast<int>(inputs.size()) - 1, 0);
  if (ip > bound && !violation_) {
    violation_ = "event " + std::to_string(event.index) + ": " + std::to_string(ip) + " stuck positions with " +
                 std::to_string(inputs.size()) + " distinct inputs posted";
  }
}

std::vector<ProcessProgram> tl_programs(const Adversary& adv, const ProtocolFactory& base, const ImageVector& inputs,
                                        const std::string& ns) {
  const int n = adv.n();
  if (inputs.size() != static_cast<std::size_t>(n)) throw InvalidParameter("need one T_L input per simulator");
  std::vector<ProcessProgram> programs;
  for (int s = 0; s < n; ++s) {
    const Value image = inputs[static_cast<std::size_t>(s)];
    if (image.is_bottom()) {
      programs.emplace_back([]() -> Machine<Value> { co_return Value{}; });
    } else {
      programs.emplace_back([adv, base, s, image, ns]() { return tl_simulator(adv, base, s, image, ns); });
    }
  }
  return programs;
}

TLRun simulate_tl(const Adversary& adv, const ProtocolFactory& base, const ImageVector& inputs, Schedule& schedule,
                  std::int64_t budget, const std::string& ns) {
  const int n = adv.n();
  const auto programs = tl_programs(adv, base, inputs, ns);
  auto monitor = std::make_shared<TLMonitor>(n, ns);
  TLRun out;
  out.execution = run(programs, schedule, budget,
                      [monitor](const TraceEvent& e, const SharedMemory& m) { (*monitor)(e, m); });
  out.outputs.assign(static_cast<std::size_t>(n), Value{});
  for (int s = 0; s < n; ++s) {
    const auto& o = out.execution.outputs[static_cast<std::size_t>(s)];
    if (o && !inputs[static_cast<std::size_t>(s)].is_bottom()) out.outputs[static_cast<std::size_t>(s)] = *o;
  }
  out.diagnostics = tl_diagnose(adv, base, out.execution.memory.snapshot(TLLayout{n, ns}.state(), 0), ns);
  out.max_ip = monitor->max_ip();
  out.monitor_violation = monitor->violation();
  return out;
}

}  // namespace hitset
