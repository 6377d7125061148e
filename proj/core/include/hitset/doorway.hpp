#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hitset/adversary.hpp"
#include "hitset/machine.hpp"
#include "hitset/value.hpp"

namespace hitset {

/// Out-of-band record of what doorway processes did, for invariant checks.
/// Not consulted by the protocol.
struct DoorwayProbe {
  enum class Kind : std::uint8_t { Proposed, RapReturned, CaCommitted, CaAdopted };
  struct Event {
    int pid;
    int sequence;  // 0-based agreement sequence index
    int level;     // instance index inside the sequence
    Kind kind;
    ProcessSet set;
  };
  std::vector<Event> events;
};

/// The doorway: post `input` to `<ns>/R[pid]`, wait until the posted inputs
/// cover a live set, then run h(S, L) parallel agreement sequences
/// (RAP, CA, RAP, CA, ...) on participant sets, one RAP step per sequence per
/// iteration, with this process resolving the sequence given by its rank in
/// the resolver set. Returns the inputs of the first committed set, encoded
/// as an image (list of `[pid, input]` pairs, ascending pid).
///
/// Loops forever in executions where no live set participates.
Machine<Value> doorway(Adversary adv, int pid, Value input, std::string ns = "dw",
                       std::shared_ptr<DoorwayProbe> probe = nullptr);

ProcessProgram doorway_program(const Adversary& adv, int pid, Value input, std::string ns = "dw",
                               std::shared_ptr<DoorwayProbe> probe = nullptr);

/// Doorway followed by a wait-free program for the companion task. The
/// companion program receives the doorway image and returns an output image;
/// every `[c, out]` pair of it is posted to `<ns>/out[c]`. The process then
/// returns its own posted output, or bottom if it has none.
Machine<Value> doorway_then(Adversary adv, int pid, Value input, ProtocolFactory companion, std::string ns = "e2e");

ProcessProgram compose_doorway_then(const Adversary& adv, const ProtocolFactory& companion, int pid, Value input,
                                    std::string ns = "e2e");

/// Posted task outputs of a composed run (bottom where nothing was posted).
std::vector<Value> posted_outputs(const class SharedMemory& memory, int n, const std::string& ns = "e2e");

}  // namespace hitset
