#include "hitset/tasks.hpp"

#include <algorithm>
#include <set>

#include "hitset/errors.hpp"

namespace hitset {

// --- TaskSpec --------------------------------------------------------------

std::vector<Value> TaskSpec::output_candidates(const TaskVector& input) const {
  std::vector<Value> out{Value{}};
  std::set<Value> seen;
  for (const auto& v : input) {
    if (!v.is_bottom() && seen.insert(v).second) out.push_back(v);
  }
  for (const auto& v : value_domain) {
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

void TaskSpec::for_each_input(const std::function<bool(const TaskVector&)>& fn) const {
  const std::size_t base = value_domain.size() + 1;
  std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
  TaskVector vec(static_cast<std::size_t>(n));
  while (true) {
    bool any = false;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      vec[i] = digits[i] == 0 ? Value{} : value_domain[digits[i] - 1];
      any = any || digits[i] != 0;
    }
    if (any && !fn(vec)) return;
    std::size_t pos = 0;
    while (pos < digits.size() && ++digits[pos] == base) digits[pos++] = 0;
    if (pos == digits.size()) return;
  }
}

bool TaskSpec::is_total() const {
  bool total = true;
  for_each_input([&](const TaskVector& input) {
    // Depth-first over output vectors; candidates start with bottom so
    // permissive tasks are confirmed quickly.
    const auto cands = output_candidates(input);
    TaskVector out(input.size());
    std::function<bool(std::size_t)> search = [&](std::size_t i) -> bool {
      if (i == out.size()) return accepts(input, out);
      for (const auto& c : cands) {
        out[i] = c;
        if (search(i + 1)) return true;
      }
      return false;
    };
    if (!search(0)) total = false;
    return total;
  });
  return total;
}

TaskSpec k_set_agreement(int n, int k, std::vector<Value> domain) {
  if (n < 1) throw InvalidParameter("k-set agreement needs n >= 1");
  if (k < 1 || k > n) throw InvalidParameter("k-set agreement needs 1 <= k <= n");
  if (domain.empty()) {
    for (int v = 1; v <= n; ++v) domain.push_back(Value::integer(v));
  }
  TaskSpec t;
  t.name = k == 1 ? "consensus" : "ksa:" + std::to_string(k);
  t.n = n;
  t.colorless = true;
  t.value_domain = std::move(domain);
  t.delta = [n, k](const TaskVector& input, const TaskVector& output) {
    if (input.size() != static_cast<std::size_t>(n) || output.size() != static_cast<std::size_t>(n)) return false;
    std::set<Value> inputs;
    for (const auto& v : input) {
      if (!v.is_bottom()) inputs.insert(v);
    }
    std::set<Value> decided;
    for (std::size_t i = 0; i < output.size(); ++i) {
      if (output[i].is_bottom()) continue;
      if (input[i].is_bottom()) return false;
      if (!inputs.contains(output[i])) return false;
      decided.insert(output[i]);
    }
    return decided.size() <= static_cast<std::size_t>(k);
  };
  return t;
}

TaskSpec task_from_name(const std::string& name, int n) {
  if (name == "consensus") return k_set_agreement(n, 1);
  if (name.rfind("ksa:", 0) == 0) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(name.substr(4), &used);
      if (used != name.size() - 4) throw std::invalid_argument(name);
    } catch (const std::exception&) {
      throw ConfigError("bad task name: " + name);
    }
    if (k < 1 || k > n) throw ConfigError("task " + name + " needs 1 <= k <= n");
    return k_set_agreement(n, k);
  }
  throw ConfigError("unknown task: " + name + " (expected ksa:K or consensus)");
}

// --- images ----------------------------------------------------------------

Value make_image(const std::vector<std::pair<int, Value>>& pairs) {
  auto sorted = pairs;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Value> items;
  items.reserve(sorted.size());
  for (const auto& [pid, v] : sorted) items.push_back(Value::list({Value::integer(pid), v}));
  return Value::list(std::move(items));
}

ProcessSet image_ids(const Value& entry) {
  ProcessSet ids;
  if (!entry.is_list()) return ids;
  for (const auto& pair : entry.items()) ids.insert(static_cast<int>(pair.at(0).as_int()));
  return ids;
}

Value image_value(const Value& entry, int pid) {
  if (!entry.is_list()) return Value{};
  for (const auto& pair : entry.items()) {
    if (pair.at(0).as_int() == pid) return pair.at(1);
  }
  return Value{};
}

Value image_of(const TaskVector& x, ProcessSet ids) {
  std::vector<std::pair<int, Value>> pairs;
  for (int id : ids.members()) pairs.emplace_back(id, x.at(static_cast<std::size_t>(id)));
  return make_image(pairs);
}

// --- validators ------------------------------------------------------------

const char* tl_reason_name(TLReason r) {
  switch (r) {
    case TLReason::Ok:
      return "ok";
    case TLReason::MalformedEntry:
      return "malformed-entry";
    case TLReason::WitnessNotLive:
      return "witness-not-live";
    case TLReason::InconsistentInput:
      return "inconsistent-input";
    case TLReason::HittingSetTooSmall:
      return "hitting-set-too-small";
    case TLReason::NoOutput:
      return "no-output";
    case TLReason::InconsistentOutput:
      return "inconsistent-output";
    case TLReason::NotInDelta:
      return "not-in-delta";
    case TLReason::ResourceLimit:
      return "resource-limit";
  }
  return "?";
}

namespace {

// Checks the shape of an image entry: a list of [pid, non-bottom value]
// pairs with strictly ascending pids below n.
bool well_formed(const Value& entry, int n) {
  if (!entry.is_list()) return false;
  std::int64_t last = -1;
  for (const auto& pair : entry.items()) {
    if (!pair.is_list() || pair.items().size() != 2 || !pair.at(0).is_int()) return false;
    const auto id = pair.at(0).as_int();
    if (id <= last || id >= n) return false;
    if (pair.at(1).is_bottom()) return false;
    last = id;
  }
  return true;
}

TLCheck fail(TLReason r, std::string detail) { return TLCheck{r, std::move(detail)}; }

// Merges every image entry into one partial vector; false on disagreement.
bool merge_images(const ImageVector& images, int n, TaskVector& into, std::string& detail) {
  into.assign(static_cast<std::size_t>(n), Value{});
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].is_bottom()) continue;
    for (const auto& pair : images[i].items()) {
      const auto id = static_cast<std::size_t>(pair.at(0).as_int());
      if (into[id].is_bottom()) {
        into[id] = pair.at(1);
      } else if (into[id] != pair.at(1)) {
        detail = "entries disagree on process " + std::to_string(id);
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TLCheck validate_tl_input(const TLTask& tl, const ImageVector& iprime, const TaskVector& base_input) {
  const int n = tl.adv.n();
  if (iprime.size() != static_cast<std::size_t>(n) || base_input.size() != static_cast<std::size_t>(n)) {
    return fail(TLReason::MalformedEntry, "vectors must have n entries");
  }
  std::set<Value> distinct;
  ProcessSet all_witnesses;
  for (std::size_t i = 0; i < iprime.size(); ++i) {
    const auto& entry = iprime[i];
    if (entry.is_bottom()) continue;
    if (!well_formed(entry, n)) return fail(TLReason::MalformedEntry, "entry " + std::to_string(i));
    const ProcessSet ids = image_ids(entry);
    if (!tl.adv.contains_live_set(ids)) {
      return fail(TLReason::WitnessNotLive, "entry " + std::to_string(i) + " covers " + ids.to_string());
    }
    for (const auto& pair : entry.items()) {
      const auto id = static_cast<std::size_t>(pair.at(0).as_int());
      if (base_input[id].is_bottom() || base_input[id] != pair.at(1)) {
        return fail(TLReason::InconsistentInput,
                    "entry " + std::to_string(i) + " disagrees with the input of process " + std::to_string(id));
      }
    }
    distinct.insert(entry);
    all_witnesses = all_witnesses | ids;
  }
  const int m = static_cast<int>(distinct.size());
  if (m == 0) return {};
  const int h = hitting_set_size(tl.adv, all_witnesses);
  if (h < m) {
    return fail(TLReason::HittingSetTooSmall, "h(" + all_witnesses.to_string() + ") = " + std::to_string(h) +
                                                  " < " + std::to_string(m) + " distinct entries");
  }
  return {};
}

TLCheck validate_tl_output(const TLTask& tl, const ImageVector& iprime, const ImageVector& oprime,
                           std::uint64_t max_candidates) {
  const int n = tl.adv.n();
  if (iprime.size() != static_cast<std::size_t>(n) || oprime.size() != static_cast<std::size_t>(n)) {
    return fail(TLReason::MalformedEntry, "vectors must have n entries");
  }
  for (const auto& entry : iprime) {
    if (!entry.is_bottom() && !well_formed(entry, n)) return fail(TLReason::MalformedEntry, "input entry");
  }
  bool any_output = false;
  for (std::size_t i = 0; i < oprime.size(); ++i) {
    if (oprime[i].is_bottom()) continue;
    any_output = true;
    if (!well_formed(oprime[i], n)) return fail(TLReason::MalformedEntry, "output entry " + std::to_string(i));
    if (!tl.adv.contains_live_set(image_ids(oprime[i]))) {
      return fail(TLReason::WitnessNotLive, "output entry " + std::to_string(i));
    }
  }
  if (!any_output) return fail(TLReason::NoOutput, "no output entry");

  TaskVector fixed_in;
  TaskVector fixed_out;
  std::string detail;
  if (!merge_images(iprime, n, fixed_in, detail)) return fail(TLReason::InconsistentInput, detail);
  if (!merge_images(oprime, n, fixed_out, detail)) return fail(TLReason::InconsistentOutput, detail);

  std::uint64_t candidates = 0;
  bool limited = false;
  TaskVector input = fixed_in;
  TaskVector output = fixed_out;
  std::vector<Value> in_choices{Value{}};
  in_choices.insert(in_choices.end(), tl.base.value_domain.begin(), tl.base.value_domain.end());

  std::function<bool(std::size_t, const std::vector<Value>&)> fill_out = [&](std::size_t i,
                                                                              const std::vector<Value>& cands) {
    if (limited) return false;
    if (i == output.size()) {
      if (++candidates > max_candidates) {
        limited = true;
        return false;
      }
      return tl.base.accepts(input, output);
    }
    if (!fixed_out[i].is_bottom()) return fill_out(i + 1, cands);
    for (const auto& c : cands) {
      output[i] = c;
      if (fill_out(i + 1, cands)) return true;
    }
    output[i] = Value{};
    return false;
  };
  std::function<bool(std::size_t)> fill_in = [&](std::size_t i) {
    if (limited) return false;
    if (i == input.size()) return fill_out(0, tl.base.output_candidates(input));
    if (!fixed_in[i].is_bottom()) return fill_in(i + 1);
    for (const auto& c : in_choices) {
      input[i] = c;
      if (fill_in(i + 1)) return true;
    }
    input[i] = Value{};
    return false;
  };
  if (fill_in(0)) return {};
  if (limited) return fail(TLReason::ResourceLimit, "more than " + std::to_string(max_candidates) + " candidates");
  return fail(TLReason::NotInDelta, "no (I, O) in Delta matches the images");
}

bool weakly_solved(const TaskSpec& task, const Adversary& adv, const TaskVector& input, const TaskVector& posted,
                   ProcessSet participants) {
  ProcessSet with_output;
  for (std::size_t i = 0; i < posted.size(); ++i) {
    if (!posted[i].is_bottom()) with_output.insert(static_cast<int>(i));
  }
  return adv.contains_live_set(with_output & participants) && task.accepts(input, posted);
}

// --- protocols -------------------------------------------------------------

Machine<Value> hs_ksa(Adversary adv, int pid, Value input, std::string ns) {
  const auto hitters = resolver_set_for(adv, adv.universe()).members();
  const std::string post = ns + "/post";
  if (std::find(hitters.begin(), hitters.end(), pid) != hitters.end()) {
    co_await MemoryOp::write_once_op(post, pid, input, "ksa-post");
  }
  while (true) {
    for (int h : hitters) {
      Value v = co_await MemoryOp::read(post, h, "ksa-scan");
      if (!v.is_bottom()) co_return v;
    }
  }
}

ProcessProgram hs_ksa_program(const Adversary& adv, int pid, Value input, std::string ns) {
  return [adv, pid, input, ns]() { return hs_ksa(adv, pid, input, ns); };
}

ProtocolFactory hs_ksa_protocol(const Adversary& adv, std::string ns) {
  return [adv, ns](int pid, Value input) { return hs_ksa(adv, pid, std::move(input), ns); };
}

Machine<Value> wait_min(int n, int t, int pid, Value input, std::string ns) {
  const std::string post = ns + "/post";
  co_await MemoryOp::write_once_op(post, pid, input, "wm-post");
  while (true) {
    Value snap = co_await MemoryOp::snapshot(post, n, "wm-scan");
    int count = 0;
    std::optional<Value> least;
    for (const auto& v : snap.items()) {
      if (v.is_bottom()) continue;
      ++count;
      if (!least || v < *least) least = v;
    }
    if (count >= n - t) co_return *least;
  }
}

ProcessProgram wait_min_program(int n, int t, int pid, Value input, std::string ns) {
  if (t < 0 || t >= n) throw InvalidParameter("wait_min needs 0 <= t < n");
  return [n, t, pid, input, ns]() { return wait_min(n, t, pid, input, ns); };
}

ProtocolFactory wait_min_protocol(int n, int t, std::string ns) {
  if (t < 0 || t >= n) throw InvalidParameter("wait_min needs 0 <= t < n");
  return [n, t, ns](int pid, Value input) { return wait_min(n, t, pid, std::move(input), ns); };
}

}  // namespace hitset
