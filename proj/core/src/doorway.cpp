#include "hitset/doorway.hpp"

#include <optional>

#include "hitset/agreement.hpp"
#include "hitset/shmem.hpp"
#include "hitset/tasks.hpp"

namespace hitset {

namespace {

ProcessSet posted(const Value& snap) {
  ProcessSet s;
  auto slots = snap.items();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].is_bottom()) s.insert(static_cast<int>(i));
  }
  return s;
}

Value encode_set(ProcessSet s) { return Value::integer(static_cast<std::int64_t>(s.bits())); }

ProcessSet decode_set(const Value& v) { return ProcessSet::from_bits(static_cast<std::uint64_t>(v.as_int())); }

struct Sequence {
  int level = 0;
  ProcessSet proposal;
  std::optional<Machine<Value>> rap;
  std::shared_ptr<RAPLocal> local;
};

void note(const std::shared_ptr<DoorwayProbe>& probe, int pid, int seq, int level, DoorwayProbe::Kind kind,
          ProcessSet set) {
  if (probe) probe->events.push_back({pid, seq, level, kind, set});
}

}  // namespace

Machine<Value> doorway(Adversary adv, int pid, Value input, std::string ns, std::shared_ptr<DoorwayProbe> probe) {
  const int n = adv.n();
  const std::string inputs = ns + "/R";

  co_await MemoryOp::write_once_op(inputs, pid, input, "dw-post");
  while (true) {
    Value snap = co_await MemoryOp::snapshot(inputs, n, "dw-wait");
    if (adv.contains_live_set(posted(snap))) break;
  }

  std::vector<Sequence> sequences(static_cast<std::size_t>(hitting_set_size(adv, adv.universe())));
  while (true) {
    Value snap = co_await MemoryOp::snapshot(inputs, n, "dw-scan");
    const ProcessSet participants = posted(snap);
    const ProcessSet resolvers = resolver_set_for(adv, participants);
    const auto ranked = resolvers.members();

    for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
      if (ranked[rank] != pid) continue;
      auto& mine = sequences[rank];
      if (!mine.local) mine.local = std::make_shared<RAPLocal>();
      rap_resolve(*mine.local);
    }

    for (std::size_t j = 0; j < ranked.size(); ++j) {
      auto& seq = sequences[j];
      const int sj = static_cast<int>(j);
      if (!seq.rap) {
        if (seq.level == 0) seq.proposal = participants;
        if (!seq.local) seq.local = std::make_shared<RAPLocal>();
        note(probe, pid, sj, seq.level, DoorwayProbe::Kind::Proposed, seq.proposal);
        RAPInstance rap{ns + "/rap/" + std::to_string(j) + "/" + std::to_string(seq.level), n, {}, 0};
        seq.rap.emplace(rap_propose(rap, pid, encode_set(seq.proposal), seq.local));
        seq.rap->start();
      }
      if (!seq.rap->done()) {
        MemoryOp op = seq.rap->pending();
        Value result = co_await std::move(op);
        seq.rap->feed(std::move(result));
      }
      if (!seq.rap->done()) continue;

      Value agreed = seq.rap->take();
      note(probe, pid, sj, seq.level, DoorwayProbe::Kind::RapReturned, decode_set(agreed));
      CAInstance ca{ns + "/ca/" + std::to_string(j) + "/" + std::to_string(seq.level), n};
      auto commit_adopt = ca_propose(ca, pid, agreed);
      CAOutcome outcome = co_await std::move(commit_adopt);
      seq.proposal = decode_set(outcome.value);
      if (outcome.flag == CAFlag::Commit) {
        note(probe, pid, sj, seq.level, DoorwayProbe::Kind::CaCommitted, seq.proposal);
        Value fresh = co_await MemoryOp::snapshot(inputs, n, "dw-collect");
        std::vector<std::pair<int, Value>> pairs;
        for (int s : seq.proposal.members()) pairs.emplace_back(s, fresh.at(static_cast<std::size_t>(s)));
        co_return make_image(pairs);
      }
      note(probe, pid, sj, seq.level, DoorwayProbe::Kind::CaAdopted, seq.proposal);
      ++seq.level;
      seq.rap.reset();
      seq.local.reset();
    }
  }
}

ProcessProgram doorway_program(const Adversary& adv, int pid, Value input, std::string ns,
                               std::shared_ptr<DoorwayProbe> probe) {
  return [adv, pid, input, ns, probe]() { return doorway(adv, pid, input, ns, probe); };
}

Machine<Value> doorway_then(Adversary adv, int pid, Value input, ProtocolFactory companion, std::string ns) {
  auto entry = doorway(adv, pid, input, ns + "/dw");
  Value image = co_await std::move(entry);
  auto task = companion(pid, image);
  Value outputs = co_await std::move(task);
  const std::string out = ns + "/out";
  Value own;
  for (const auto& pair : outputs.items()) {
    const int c = static_cast<int>(pair.at(0).as_int());
    co_await MemoryOp::write(out, c, pair.at(1), "post-output");
    if (c == pid) own = pair.at(1);
  }
  co_return own;
}

ProcessProgram compose_doorway_then(const Adversary& adv, const ProtocolFactory& companion, int pid, Value input,
                                    std::string ns) {
  return [adv, companion, pid, input, ns]() { return doorway_then(adv, pid, input, companion, ns); };
}

std::vector<Value> posted_outputs(const SharedMemory& memory, int n, const std::string& ns) {
  return memory.snapshot(ns + "/out", n);
}

}  // namespace hitset
