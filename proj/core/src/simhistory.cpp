#include "hitset/simhistory.hpp"

#include <algorithm>

#include "hitset/errors.hpp"

namespace hitset {

Value encode_frontier(const Frontier& f) {
  std::vector<Value> items;
  items.reserve(f.counts.size() + 1);
  items.push_back(Value::integer(static_cast<std::int64_t>(f.mask.bits())));
  for (int c : f.counts) items.push_back(Value::integer(c));
  return Value::list(std::move(items));
}

Frontier decode_frontier(const Value& v, int n) {
  if (!v.is_list() || v.items().size() != static_cast<std::size_t>(n) + 1) {
    throw ProtocolFault("malformed frontier " + v.to_string());
  }
  Frontier f;
  f.mask = ProcessSet::from_bits(static_cast<std::uint64_t>(v.at(0).as_int()));
  f.counts.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) f.counts.push_back(static_cast<int>(v.at(static_cast<std::size_t>(c) + 1).as_int()));
  return f;
}

SimulatedHistory::SimulatedHistory(int n, ProtocolFactory code)
    : code_(std::move(code)), codes_(static_cast<std::size_t>(n)) {}

ProcessSet SimulatedHistory::participating() const {
  ProcessSet s;
  for (int c = 0; c < n(); ++c) {
    if (codes_[static_cast<std::size_t>(c)].started) s.insert(c);
  }
  return s;
}

ProcessSet SimulatedHistory::terminated_set() const {
  ProcessSet s;
  for (int c = 0; c < n(); ++c) {
    if (terminated(c)) s.insert(c);
  }
  return s;
}

Frontier SimulatedHistory::frontier() const {
  Frontier f;
  f.mask = participating();
  f.counts.reserve(codes_.size());
  for (const auto& code : codes_) f.counts.push_back(code.reads);
  return f;
}

void SimulatedHistory::advance(const InputFn& inputs, const DecisionFn& decisions) {
  for (int c = 0; c < n(); ++c) {
    auto& code = codes_[static_cast<std::size_t>(c)];
    if (code.started) continue;
    Value input = inputs(c);
    if (input.is_bottom()) continue;
    code.machine = code_(c, std::move(input));
    code.started = true;
  }
  // A read may wait on another code's writes, which in turn only depend on
  // strictly earlier frontiers, so sweeping until nothing moves reaches the
  // fixpoint.
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (int c = 0; c < n(); ++c) progressed = run_code(c, decisions) || progressed;
  }
}

bool SimulatedHistory::run_code(int c, const DecisionFn& decisions) {
  auto& code = codes_[static_cast<std::size_t>(c)];
  if (!code.started || code.output) return false;
  bool progressed = false;
  if (!code.machine.started()) {
    code.machine.start();
    progressed = true;
  }
  std::int64_t local_run = 0;
  while (!code.machine.done()) {
    const MemoryOp& op = code.machine.pending();
    if (op.kind == MemoryOp::Kind::Write || op.kind == MemoryOp::Kind::Yield) {
      if (++local_run > kMaxLocalRun) {
        throw ProtocolFault("simulated code " + std::to_string(c) + " runs without reading");
      }
      if (op.kind == MemoryOp::Kind::Write) {
        auto& reg = memory_[op.array][op.index];
        if (reg.owner >= 0 && reg.owner != c) {
          throw ProtocolFault("simulated register " + op.array + "[" + std::to_string(op.index) +
                              "] has two writers");
        }
        reg.owner = c;
        reg.writes.emplace_back(code.reads, op.value);
      }
      ++steps_;
      code.machine.feed(Value{});
      progressed = true;
      continue;
    }
    Value agreed = decisions(c, code.reads);
    if (agreed.is_bottom()) break;
    auto result = answer(op, decode_frontier(agreed, n()));
    if (!result) break;
    ++steps_;
    ++code.reads;
    local_run = 0;
    code.machine.feed(std::move(*result));
    progressed = true;
  }
  if (code.machine.done() && !code.output) {
    code.output = code.machine.take();
    progressed = true;
  }
  return progressed;
}

Value SimulatedHistory::visible(const Register& reg, const Frontier& f) const {
  if (!f.mask.contains(reg.owner)) return Value{};
  const int limit = f.counts[static_cast<std::size_t>(reg.owner)];
  Value v;
  for (const auto& [stamp, value] : reg.writes) {
    if (stamp > limit) break;
    v = value;
  }
  return v;
}

std::optional<Value> SimulatedHistory::answer(const MemoryOp& op, const Frontier& f) const {
  // Every writer in the frontier must have been replayed past its stamp
  // limit, otherwise a write the read should see may still be missing.
  for (int d : f.mask.members()) {
    if (d >= n()) throw ProtocolFault("frontier names an unknown code");
    const auto& code = codes_[static_cast<std::size_t>(d)];
    if (!code.started) return std::nullopt;
    if (!code.output && code.reads <= f.counts[static_cast<std::size_t>(d)]) {
      // Writes stamped counts[d] are issued after read counts[d]-1 and
      // before read counts[d]; they are complete once d blocks on a read
      // with index counts[d], which is exactly when reads == counts[d] and
      // the machine is parked on a read.
      if (code.reads < f.counts[static_cast<std::size_t>(d)]) return std::nullopt;
      const auto& pending = code.machine.pending();
      if (pending.kind == MemoryOp::Kind::Write || pending.kind == MemoryOp::Kind::Yield) return std::nullopt;
    }
  }
  auto array = memory_.find(op.array);
  if (op.kind == MemoryOp::Kind::Read) {
    if (array == memory_.end()) return Value{};
    auto reg = array->second.find(op.index);
    return reg == array->second.end() ? Value{} : visible(reg->second, f);
  }
  int size = op.size;
  if (size == 0 && array != memory_.end()) {
    for (const auto& [index, reg] : array->second) {
      if (!visible(reg, f).is_bottom()) size = std::max(size, index + 1);
    }
  }
  std::vector<Value> slots(static_cast<std::size_t>(size));
  if (array != memory_.end()) {
    for (const auto& [index, reg] : array->second) {
      if (index >= 0 && index < size) slots[static_cast<std::size_t>(index)] = visible(reg, f);
    }
  }
  return Value::list(std::move(slots));
}

}  // namespace hitset
