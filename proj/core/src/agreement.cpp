#include "hitset/agreement.hpp"

#include "hitset/errors.hpp"

namespace hitset {

Value encode(const CAOutcome& outcome) {
  return Value::list({Value::integer(outcome.flag == CAFlag::Commit ? 1 : 0), outcome.value});
}

CAOutcome decode_ca_outcome(const Value& v) {
  return CAOutcome{v.at(0).as_int() == 1 ? CAFlag::Commit : CAFlag::Adopt, v.at(1)};
}

const char* rap_status_name(RAPStatus s) {
  switch (s) {
    case RAPStatus::Running:
      return "running";
    case RAPStatus::Stuck:
      return "stuck";
    case RAPStatus::Resolved:
      return "resolved";
    case RAPStatus::Returned:
      return "returned";
  }
  return "?";
}

Machine<CAOutcome> ca_propose(CAInstance instance, int pid, Value v) {
  if (v.is_bottom()) throw ProtocolFault("commit-adopt proposal must not be bottom");
  const std::string p1 = instance.name + "/p1";
  const std::string p2 = instance.name + "/p2";

  co_await MemoryOp::write_once_op(p1, pid, v, "ca1");
  Value seen = co_await MemoryOp::snapshot(p1, instance.n, "ca1");
  bool confident = true;
  for (const auto& other : seen.items()) {
    if (!other.is_bottom() && other != v) confident = false;
  }

  Value record = Value::list({Value::integer(confident ? 1 : 0), v});
  co_await MemoryOp::write_once_op(p2, pid, record, "ca2");
  Value records = co_await MemoryOp::snapshot(p2, instance.n, "ca2");
  bool unanimous = true;
  std::optional<Value> confident_value;
  for (const auto& rec : records.items()) {
    if (rec.is_bottom()) continue;
    const bool flag = rec.at(0).as_int() == 1;
    if (!flag || rec.at(1) != v) unanimous = false;
    if (flag && !confident_value) confident_value = rec.at(1);
  }
  if (unanimous) co_return CAOutcome{CAFlag::Commit, v};
  if (confident_value) co_return CAOutcome{CAFlag::Adopt, *confident_value};
  co_return CAOutcome{CAFlag::Adopt, v};
}

Machine<Value> rap_propose(RAPInstance instance, int pid, Value v, std::shared_ptr<RAPLocal> local) {
  const std::string d = instance.decision_array();
  const int di = instance.d_index;

  auto commit_adopt = ca_propose(instance.ca(), pid, v);
  CAOutcome ca = co_await std::move(commit_adopt);
  Value est = ca.value;
  if (ca.flag == CAFlag::Commit) {
    co_await MemoryOp::write(d, di, est, "rap-commit");
    local->status = RAPStatus::Returned;
    local->returned = est;
    co_return est;
  }
  while (true) {
    if (local->resolver) co_await MemoryOp::write(d, di, est, "rap-resolve");
    Value decided = co_await MemoryOp::read(d, di, "rap-wait");
    if (!decided.is_bottom()) {
      local->status = RAPStatus::Resolved;
      local->returned = decided;
      co_return decided;
    }
    local->status = RAPStatus::Stuck;
  }
}

Machine<Value> rap_process(RAPInstance instance, int pid, Value v, std::optional<std::int64_t> resolve_after) {
  auto local = std::make_shared<RAPLocal>();
  if (resolve_after && *resolve_after <= 0) rap_resolve(*local);
  Machine<Value> proposing = rap_propose(std::move(instance), pid, std::move(v), local);
  proposing.start();
  std::int64_t steps = 0;
  while (!proposing.done()) {
    MemoryOp op = proposing.pending();
    Value result = co_await std::move(op);
    proposing.feed(std::move(result));
    if (resolve_after && ++steps >= *resolve_after) rap_resolve(*local);
  }
  co_return proposing.take();
}

}  // namespace hitset
