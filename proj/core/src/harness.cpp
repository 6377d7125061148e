#include "hitset/harness.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "hitset/agreement.hpp"
#include "hitset/assim.hpp"
#include "hitset/bgsim.hpp"
#include "hitset/doorway.hpp"
#include "hitset/errors.hpp"
#include "hitset/tasks.hpp"

namespace hitset {

using nlohmann::json;

// --- scenarios -------------------------------------------------------------

json Scenario::to_json() const {
  json in = json::array();
  for (const auto& v : inputs) in.push_back(v.to_json());
  json j = {{"protocol", protocol}, {"adversary", adv.to_json()}, {"inputs", in}};
  if (protocol == "wait-min" || protocol == "bg") j["t"] = t;
  if (!resolve_after.empty()) {
    json r = json::object();
    for (const auto& [pid, steps] : resolve_after) r[std::to_string(pid)] = steps;
    j["resolve_after"] = r;
  }
  if (codes > 0) j["codes"] = codes;
  return j;
}

Scenario Scenario::from_json(const json& j) {
  try {
    Scenario s;
    s.protocol = j.at("protocol").get<std::string>();
    s.adv = Adversary::from_json(j.at("adversary"));
    for (const auto& v : j.at("inputs")) s.inputs.push_back(Value::from_json(v));
    s.t = j.value("t", 1);
    s.codes = j.value("codes", 0);
    if (j.contains("resolve_after")) {
      for (const auto& [pid, steps] : j.at("resolve_after").items()) {
        s.resolve_after[std::stoi(pid)] = steps.get<std::int64_t>();
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad scenario: ") + e.what());
  }
}

Adversary wait_free_adversary(int n) {
  std::vector<ProcessSet> singletons;
  for (int p = 0; p < n; ++p) singletons.push_back(ProcessSet::from_bits(std::uint64_t{1} << p));
  return Adversary(n, singletons);
}

namespace {

Machine<Value> returns_bottom() { co_return Value{}; }

Machine<Value> ca_process(CAInstance instance, int pid, Value v) {
  auto proposing = ca_propose(std::move(instance), pid, std::move(v));
  CAOutcome outcome = co_await std::move(proposing);
  co_return encode(outcome);
}

}  // namespace

std::vector<ProcessProgram> build_programs(const Scenario& sc) {
  const int n = sc.n();
  if (sc.inputs.size() != static_cast<std::size_t>(n)) {
    throw ConfigError("scenario needs " + std::to_string(n) + " inputs, got " + std::to_string(sc.inputs.size()));
  }
  const auto& adv = sc.adv;
  if (sc.protocol == "tl") return tl_programs(adv, hs_ksa_protocol(adv), sc.inputs);
  if (sc.protocol == "bg") {
    const int codes = sc.codes > 0 ? sc.codes : n;
    if (sc.t < 0 || sc.t >= codes) throw ConfigError("bg needs 0 <= t < codes");
    return bg_programs(adv, wait_min_protocol(codes, sc.t), sc.inputs, codes);
  }
  if (sc.protocol == "wait-min" && (sc.t < 0 || sc.t >= n)) throw ConfigError("wait-min needs 0 <= t < n");

  std::vector<ProcessProgram> programs;
  for (int p = 0; p < n; ++p) {
    const Value input = sc.inputs[static_cast<std::size_t>(p)];
    if (input.is_bottom()) {
      programs.emplace_back(returns_bottom);
      continue;
    }
    if (sc.protocol == "ca") {
      programs.emplace_back([n, p, input]() { return ca_process(CAInstance{"ca", n}, p, input); });
    } else if (sc.protocol == "rap") {
      std::optional<std::int64_t> after;
      if (auto it = sc.resolve_after.find(p); it != sc.resolve_after.end()) after = it->second;
      programs.emplace_back([n, p, input, after]() { return rap_process(RAPInstance{"rap", n, {}, 0}, p, input, after); });
    } else if (sc.protocol == "doorway") {
      programs.push_back(doorway_program(adv, p, input));
    } else if (sc.protocol == "hs-ksa") {
      programs.push_back(hs_ksa_program(adv, p, input));
    } else if (sc.protocol == "wait-min") {
      programs.push_back(wait_min_program(n, sc.t, p, input));
    } else if (sc.protocol == "e2e") {
      programs.push_back(compose_doorway_then(adv, tl_protocol(adv, hs_ksa_protocol(adv), "e2e/tl"), p, input));
    } else {
      throw ConfigError("unknown protocol: " + sc.protocol);
    }
  }
  return programs;
}

// --- schedules -------------------------------------------------------------

FairSchedule CrashScenario::schedule() const { return FairSchedule(correct, participants, plan, {}, shuffle_seed); }

json CrashScenario::to_json() const {
  json crash = json::object();
  for (const auto& [pid, slot] : plan.crash_slot) crash[std::to_string(pid)] = slot;
  json on = json::object();
  for (const auto& [pid, label] : plan.crash_label) on[std::to_string(pid)] = label;
  json after = json::object();
  for (const auto& [pid, steps] : plan.label_after_steps) after[std::to_string(pid)] = steps;
  json j = {{"fair", correct.members()}, {"participants", participants.members()}, {"crash", crash}};
  if (!on.empty()) j["crash_on"] = on;
  if (!after.empty()) j["crash_after"] = after;
  j["seed"] = shuffle_seed;
  return j;
}

CrashScenario random_crash_schedule(std::uint64_t seed, ProcessSet participants, const Adversary& adv,
                                    bool l_resilient, std::int64_t length) {
  if (length <= 0) throw ConfigError("crash window length must be positive");
  if (participants.empty()) throw ConfigError("no participants");
  std::mt19937_64 rng(seed);
  auto coin = [&]() { return (rng() & 1U) != 0; };
  CrashScenario s;
  s.participants = participants;

  if (l_resilient) {
    const auto live = adv.restriction(participants);
    if (live.empty()) throw ConfigError("no live set among the participants " + participants.to_string());
    s.correct = live[rng() % live.size()];
    for (int p : (participants - s.correct).members()) {
      if (coin()) s.correct.insert(p);
    }
  } else {
    for (int p : participants.members()) {
      if (coin()) s.correct.insert(p);
    }
    while (adv.contains_live_set(s.correct)) {
      const auto live = adv.restriction(s.correct);
      const auto members = live[rng() % live.size()].members();
      s.correct.erase(members[rng() % members.size()]);
    }
  }
  for (int p : (participants - s.correct).members()) {
    s.plan.crash_slot[p] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(length));
  }
  s.shuffle_seed = rng();
  return s;
}

namespace {

std::map<int, json> pid_map(const json& j, int n, const char* field) {
  std::map<int, json> out;
  if (!j.contains(field)) return out;
  if (!j.at(field).is_object()) throw ConfigError(std::string("schedule field ") + field + " must be an object");
  for (const auto& [key, value] : j.at(field).items()) {
    int pid = 0;
    try {
      pid = std::stoi(key);
    } catch (const std::exception&) {
      throw ConfigError("bad pid in schedule: " + key);
    }
    if (pid < 0 || pid >= n) throw ConfigError("pid out of range in schedule: " + key);
    out[pid] = value;
  }
  return out;
}

ProcessSet pid_set(const json& j, int n) {
  ProcessSet s;
  if (!j.is_array()) throw ConfigError("expected an array of pids");
  for (const auto& v : j) {
    const int pid = v.get<int>();
    if (pid < 0 || pid >= n) throw ConfigError("pid out of range in schedule: " + std::to_string(pid));
    s.insert(pid);
  }
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

std::unique_ptr<Schedule> parse_schedule(const std::string& spec_or_path, int n) {
  const auto start = spec_or_path.find_first_not_of(" \t\r\n");
  const bool inline_spec = start != std::string::npos && (spec_or_path[start] == '[' || spec_or_path[start] == '{');
  const std::string text = inline_spec ? spec_or_path : read_file(spec_or_path);
  try {
    const json j = json::parse(text);
    if (j.is_array()) {
      std::vector<int> pids;
      for (const auto& v : j) {
        const int pid = v.get<int>();
        if (pid < 0 || pid >= n) throw ConfigError("pid out of range in schedule: " + std::to_string(pid));
        pids.push_back(pid);
      }
      return std::make_unique<ListSchedule>(std::move(pids));
    }
    if (!j.is_object()) throw ConfigError("schedule must be a JSON array or object");
    if (j.contains("random")) return std::make_unique<RandomSchedule>(j.at("random").get<std::uint64_t>());
    if (!j.contains("fair")) throw ConfigError("schedule object needs \"fair\" or \"random\"");
    const ProcessSet correct = pid_set(j.at("fair"), n);
    CrashPlan plan;
    for (const auto& [pid, v] : pid_map(j, n, "crash")) plan.crash_slot[pid] = v.get<std::int64_t>();
    for (const auto& [pid, v] : pid_map(j, n, "crash_on")) plan.crash_label[pid] = v.get<std::string>();
    for (const auto& [pid, v] : pid_map(j, n, "crash_after")) plan.label_after_steps[pid] = v.get<std::int64_t>();
    ProcessSet participants = correct;
    if (j.contains("participants")) {
      participants = pid_set(j.at("participants"), n);
    } else {
      for (const auto& [pid, slot] : plan.crash_slot) participants.insert(pid);
      for (const auto& [pid, label] : plan.crash_label) participants.insert(pid);
    }
    std::vector<int> prefix;
    if (j.contains("prefix")) {
      for (const auto& v : j.at("prefix")) prefix.push_back(v.get<int>());
    }
    std::optional<std::uint64_t> seed;
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    return std::make_unique<FairSchedule>(correct, participants, plan, prefix, seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad schedule: ") + e.what());
  }
}

// --- traces ----------------------------------------------------------------

void write_trace_file(const std::string& path, const json& meta, const std::vector<TraceEvent>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << json{{"meta", meta}}.dump() << '\n' << trace_to_jsonl(trace);
}

TraceFile read_trace_file(const std::string& path) {
  const std::string text = read_file(path);
  TraceFile tf;
  std::size_t body = 0;
  const auto first_end = text.find('\n');
  const std::string first = text.substr(0, first_end);
  try {
    const json head = json::parse(first);
    if (head.is_object() && head.contains("meta")) {
      tf.meta = head.at("meta");
      body = first_end == std::string::npos ? text.size() : first_end + 1;
    }
    tf.events_text = text.substr(body);
    tf.trace = trace_from_jsonl(tf.events_text);
  } catch (const json::exception& e) {
    throw ConfigError("bad trace file " + path + ": " + e.what());
  }
  return tf;
}

json trace_meta(const Scenario& scenario, const std::string& note) {
  json meta = {{"scenario", scenario.to_json()}};
  if (!note.empty()) meta["note"] = note;
  return meta;
}

ReplayResult replay_trace_file(const std::string& path) {
  const TraceFile tf = read_trace_file(path);
  if (!tf.meta.contains("scenario")) throw ConfigError(path + " has no scenario header");
  const Scenario scenario = Scenario::from_json(tf.meta.at("scenario"));
  const auto programs = build_programs(scenario);
  ListSchedule schedule(schedule_of(tf.trace));
  ReplayResult result;
  result.execution = run(programs, schedule, static_cast<std::int64_t>(tf.trace.size()) + 1);
  const std::string regenerated = trace_to_jsonl(result.execution.trace);
  result.identical = regenerated == tf.events_text;
  if (!result.identical) {
    std::istringstream a(tf.events_text);
    std::istringstream b(regenerated);
    std::string la;
    std::string lb;
    for (int line = 1;; ++line) {
      const bool ga = static_cast<bool>(std::getline(a, la));
      const bool gb = static_cast<bool>(std::getline(b, lb));
      if (!ga && !gb) {
        result.detail = "traces differ in line endings";
        break;
      }
      if (ga != gb || la != lb) {
        result.detail = "first difference at event line " + std::to_string(line);
        break;
      }
    }
  }
  return result;
}

// --- reports ---------------------------------------------------------------

int Report::exit_code() const {
  bool liveness = false;
  for (const auto& v : violations) {
    if (v.kind == "safety") return kExitViolation;
    liveness = true;
  }
  return liveness ? kExitLiveness : kExitPass;
}

json Report::to_json() const {
  json vs = json::array();
  for (const auto& v : violations) {
    json e = {{"kind", v.kind}, {"description", v.description}};
    if (!v.trace_path.empty()) e["trace"] = v.trace_path;
    vs.push_back(e);
  }
  return {{"suite", suite},     {"cases", cases},  {"violations", vs},
          {"seconds", seconds}, {"stats", stats},  {"exit_code", exit_code()}};
}

// --- oracles ---------------------------------------------------------------

std::vector<ProcessSet> naive_min_hitting_sets(const std::vector<ProcessSet>& sets, ProcessSet universe) {
  std::vector<ProcessSet> inside;
  for (const auto& s : sets) {
    if (s.subset_of(universe)) inside.push_back(s);
  }
  if (inside.empty()) return {};
  const auto members = universe.members();
  const std::size_t m = members.size();
  for (std::size_t k = 0; k <= m; ++k) {
    std::vector<ProcessSet> found;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) != k) continue;
      ProcessSet candidate;
      for (std::size_t i = 0; i < m; ++i) {
        if ((mask >> i) & 1U) candidate.insert(members[i]);
      }
      if (std::all_of(inside.begin(), inside.end(), [&](ProcessSet s) { return s.intersects(candidate); })) {
        found.push_back(candidate);
      }
    }
    if (!found.empty()) {
      std::sort(found.begin(), found.end());
      return found;
    }
  }
  return {};
}

Adversary random_adversary(std::uint64_t seed, int n, int max_sets) {
  if (n < 1 || n > 20) throw InvalidParameter("random adversary needs 1 <= n <= 20");
  std::mt19937_64 rng(seed);
  const int count = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(1, max_sets)));
  std::vector<ProcessSet> sets;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (int i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    while (bits == 0) bits = rng() & full;
    sets.push_back(ProcessSet::from_bits(bits));
  }
  return Adversary(n, sets);
}

// --- suites ----------------------------------------------------------------

namespace {

class Suite {
 public:
  Suite(std::string name, const SuiteParams& params) : params_(params) { report_.suite = std::move(name); }

  void violation(const std::string& kind, const std::string& description, const Scenario* scenario = nullptr,
                 const Execution* execution = nullptr) {
    Violation v{kind, description, {}};
    if (scenario != nullptr && execution != nullptr && !params_.trace_dir.empty()) {
      std::filesystem::create_directories(params_.trace_dir);
      v.trace_path = (std::filesystem::path(params_.trace_dir) /
                      (report_.suite + "-" + std::to_string(report_.violations.size()) + ".jsonl"))
                         .string();
      write_trace_file(v.trace_path, trace_meta(*scenario, description), execution->trace);
    }
    report_.violations.push_back(std::move(v));
  }

  void count(std::uint64_t k = 1) { report_.cases += k; }
  json& stats() { return report_.stats; }
  [[nodiscard]] const SuiteParams& params() const { return params_; }
  [[nodiscard]] bool failed() const { return !report_.violations.empty(); }
  Report finish() { return std::move(report_); }

 private:
  const SuiteParams& params_;
  Report report_;
};

Scenario scenario_of(std::string protocol, Adversary adv, std::vector<Value> inputs) {
  Scenario sc;
  sc.protocol = std::move(protocol);
  sc.adv = std::move(adv);
  sc.inputs = std::move(inputs);
  return sc;
}

std::vector<Value> int_values(const std::vector<int>& xs) {
  std::vector<Value> out;
  for (int x : xs) out.push_back(Value::integer(x));
  return out;
}

/// All vectors of length n over {1..k}.
std::vector<std::vector<int>> all_assignments(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 1);
  while (true) {
    out.push_back(cur);
    int i = 0;
    while (i < n && ++cur[static_cast<std::size_t>(i)] > k) cur[static_cast<std::size_t>(i++)] = 1;
    if (i == n) return out;
  }
}

// commit-adopt (a)-(c) on one execution
std::string check_ca(const std::vector<Value>& inputs, const Execution& ex) {
  std::set<Value> proposed;
  for (const auto& v : inputs) {
    if (!v.is_bottom()) proposed.insert(v);
  }
  std::optional<Value> committed;
  for (const auto& o : ex.outputs) {
    if (!o) continue;
    const auto outcome = decode_ca_outcome(*o);
    if (!proposed.contains(outcome.value)) return "(a) returned value " + outcome.value.to_string() + " not proposed";
    if (proposed.size() == 1 && outcome.flag != CAFlag::Commit) return "(b) single proposed value not committed";
    if (outcome.flag == CAFlag::Commit) {
      if (committed && *committed != outcome.value) return "(c) two values committed";
      committed = outcome.value;
    }
  }
  if (committed) {
    for (const auto& o : ex.outputs) {
      if (o && decode_ca_outcome(*o).value != *committed) return "(c) commit of " + committed->to_string() + " but another value returned";
    }
  }
  return {};
}

Report suite_ca(const SuiteParams& p) {
  Suite s("ca", p);
  if (p.mode == "exhaustive") {
    if (p.n < 1 || p.n > 3) throw ConfigError("exhaustive ca supports n <= 3");
    std::uint64_t interleavings = 0;
    std::uint64_t states = 0;
    for (const auto& assignment : all_assignments(p.n, 3)) {
      Scenario sc = scenario_of("ca", wait_free_adversary(p.n), int_values(assignment));
      ExploreOptions options;
      options.depth = 5 * p.n;
      auto report = explore(build_programs(sc), options, [&](const Execution& ex) { return check_ca(sc.inputs, ex); });
      interleavings += report.interleavings;
      states += report.states;
      s.count();
      if (report.violation) s.violation("safety", *report.violation, &sc, report.counterexample ? &*report.counterexample : nullptr);
      if (report.depth_cut_states > 0) s.violation("liveness", "(d) a process did not return within 4 steps");
      if (report.resource_limit) s.violation("liveness", "state limit reached");
    }
    s.stats()["interleavings"] = interleavings;
    s.stats()["states"] = states;
    return s.finish();
  }
  if (p.mode != "random") throw ConfigError("mode must be random or exhaustive");
  std::mt19937_64 rng(p.seed);
  for (int i = 0; i < p.cases; ++i) {
    std::vector<int> in;
    for (int q = 0; q < p.n; ++q) in.push_back(1 + static_cast<int>(rng() % 3));
    Scenario sc = scenario_of("ca", wait_free_adversary(p.n), int_values(in));
    RandomSchedule schedule(rng());
    const auto ex = run(build_programs(sc), schedule, p.budget);
    s.count();
    if (auto err = check_ca(sc.inputs, ex); !err.empty()) s.violation("safety", err, &sc, &ex);
    if (ex.status != RunStatus::AllTerminated) s.violation("liveness", "(d) not every process returned", &sc, &ex);
  }
  return s.finish();
}

std::string check_rap(const Scenario& sc, const Execution& ex) {
  std::set<Value> proposed(sc.inputs.begin(), sc.inputs.end());
  std::set<Value> returned;
  for (const auto& o : ex.outputs) {
    if (!o) continue;
    if (!proposed.contains(*o)) return "(i) returned " + o->to_string() + " was not proposed";
    returned.insert(*o);
  }
  if (sc.resolve_after.size() <= 1 && returned.size() > 1) return "(iv) two values returned with at most one resolver";
  return {};
}

/// Continues `prefix` with `pid` alone for `steps` steps; true if it returns.
bool solo_returns(const std::vector<ProcessProgram>& programs, const std::vector<int>& prefix, int pid, int steps) {
  std::vector<int> pids = prefix;
  pids.insert(pids.end(), static_cast<std::size_t>(steps), pid);
  ListSchedule schedule(std::move(pids));
  const auto ex = run(programs, schedule, static_cast<std::int64_t>(prefix.size()) + steps + 1);
  return ex.outputs[static_cast<std::size_t>(pid)].has_value();
}

/// Schedule in which both processes adopt different values and then wait.
Execution rap_stuck_witness() {
  Scenario sc = scenario_of("rap", wait_free_adversary(2), int_values({1, 2}));
  ListSchedule schedule({0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
  return run(build_programs(sc), schedule, 100);
}

Report suite_rap(const SuiteParams& p) {
  Suite s("rap", p);
  {
    const auto witness = rap_stuck_witness();
    bool waiting = witness.terminated().empty();
    int bottom_reads = 0;
    for (const auto& e : witness.trace) {
      if (e.op == "read" && e.phase == "rap-wait" && e.value.is_bottom()) ++bottom_reads;
    }
    waiting = waiting && bottom_reads >= 2;
    s.stats()["stuck_witness"] = waiting;
    if (!waiting) s.violation("safety", "no Stuck witness with diverging inputs and no resolver");
  }
  if (p.mode == "exhaustive") {
    if (p.n != 2) throw ConfigError("exhaustive rap supports n = 2");
    const std::vector<std::optional<std::int64_t>> timings{std::nullopt, 0, 3, 6};
    std::uint64_t interleavings = 0;
    for (const auto& assignment : all_assignments(2, 2)) {
      for (const auto& t0 : timings) {
        for (const auto& t1 : timings) {
          Scenario sc = scenario_of("rap", wait_free_adversary(2), int_values(assignment));
          if (t0) sc.resolve_after[0] = *t0;
          if (t1) sc.resolve_after[1] = *t1;
          const auto programs = build_programs(sc);
          ExploreOptions options;
          options.depth = 20;
          auto report = explore(programs, options, [&](const Execution& ex) -> std::string {
            if (auto err = check_rap(sc, ex); !err.empty()) return err;
            const bool same = assignment[0] == assignment[1];
            const bool someone_returned = !ex.terminated().empty();
            const auto prefix = schedule_of(ex.trace);
            for (int q = 0; q < 2; ++q) {
              if (ex.outputs[static_cast<std::size_t>(q)]) continue;
              const bool resolver = sc.resolve_after.contains(q);
              if (!same && !someone_returned && !resolver) continue;
              if (!solo_returns(programs, prefix, q, 16)) {
                if (same || someone_returned) {
                  return "(ii) process " + std::to_string(q) + " cannot return although " +
                         (same ? std::string("inputs agree") : std::string("another process returned"));
                }
                return "(iii) resolver " + std::to_string(q) + " cannot return running alone";
              }
            }
            return {};
          });
          interleavings += report.interleavings;
          s.count();
          if (report.violation) {
            s.violation("safety", *report.violation, &sc, report.counterexample ? &*report.counterexample : nullptr);
          }
          if (report.resource_limit) s.violation("liveness", "state limit reached");
        }
      }
    }
    s.stats()["interleavings"] = interleavings;
    return s.finish();
  }
  if (p.mode != "random") throw ConfigError("mode must be random or exhaustive");
  if (p.n < 1 || p.n > 8) throw ConfigError("random rap supports 1 <= n <= 8");
  std::mt19937_64 rng(p.seed);
  const Adversary wf = wait_free_adversary(p.n);
  for (int i = 0; i < p.cases; ++i) {
    std::vector<int> in;
    for (int q = 0; q < p.n; ++q) in.push_back(1 + static_cast<int>(rng() % 2));
    Scenario sc = scenario_of("rap", wf, int_values(in));
    const int resolvers = static_cast<int>(rng() % static_cast<std::uint64_t>(p.n + 1));
    for (int r = 0; r < resolvers; ++r) {
      sc.resolve_after[static_cast<int>(rng() % static_cast<std::uint64_t>(p.n))] = static_cast<std::int64_t>(rng() % 10);
    }
    const auto crash = random_crash_schedule(rng(), ProcessSet::full(p.n), wf, true, 20);
    FairSchedule schedule = crash.schedule();
    const auto ex = run(build_programs(sc), schedule, p.budget);
    s.count();
    if (auto err = check_rap(sc, ex); !err.empty()) {
      s.violation("safety", err, &sc, &ex);
      continue;
    }
    const bool same = std::all_of(in.begin(), in.end(), [&](int v) { return v == in[0]; });
    bool correct_resolver = false;
    for (const auto& [pid, after] : sc.resolve_after) correct_resolver = correct_resolver || crash.correct.contains(pid);
    const bool must_return = same || !ex.terminated().empty() || correct_resolver;
    if (must_return && !crash.correct.subset_of(ex.terminated())) {
      s.violation("liveness", std::string(correct_resolver ? "(iii)" : "(ii)") + " a correct process did not return",
                  &sc, &ex);
    }
  }
  return s.finish();
}

std::vector<Adversary> doorway_adversaries(const SuiteParams& p) {
  if (p.adv) return {*p.adv};
  return {t_resilient_adversary(4, 1), Adversary(3, {ProcessSet::from_bits(1), ProcessSet::from_bits(6)}),
          Adversary(4, {ProcessSet::from_bits(3), ProcessSet::from_bits(12)})};
}

std::vector<Value> masked(const std::vector<Value>& xs, ProcessSet keep) {
  std::vector<Value> out(xs.size());
  for (int q : keep.members()) {
    if (static_cast<std::size_t>(q) < xs.size()) out[static_cast<std::size_t>(q)] = xs[static_cast<std::size_t>(q)];
  }
  return out;
}

std::vector<Value> returned_values(const Execution& ex) {
  std::vector<Value> out(ex.outputs.size());
  for (std::size_t q = 0; q < ex.outputs.size(); ++q) {
    if (ex.outputs[q]) out[q] = *ex.outputs[q];
  }
  return out;
}

Report suite_doorway(const SuiteParams& p) {
  Suite s("doorway", p);
  std::mt19937_64 rng(p.seed);
  std::uint64_t incomplete_unsafe = 0;
  for (const auto& adv : doorway_adversaries(p)) {
    const int n = adv.n();
    const TLTask tl{k_set_agreement(n, 1), adv};
    for (int i = 0; i < p.cases; ++i) {
      for (const bool l_resilient : {true, false}) {
        std::vector<int> in;
        for (int q = 0; q < n; ++q) in.push_back(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n)));
        Scenario sc = scenario_of("doorway", adv, int_values(in));
        const auto crash = random_crash_schedule(rng(), ProcessSet::full(n), adv, l_resilient, 60L * n);
        FairSchedule schedule = crash.schedule();
        const auto ex = run(build_programs(sc), schedule, p.budget);
        s.count();
        const auto check = validate_tl_input(tl, returned_values(ex), masked(sc.inputs, ex.participants));
        if (!check.ok()) {
          s.violation("safety", std::string("doorway output rejected: ") + tl_reason_name(check.reason) + " " + check.detail,
                      &sc, &ex);
        }
        if (l_resilient && !crash.correct.subset_of(ex.terminated())) {
          s.violation("liveness", "a correct process did not return in an L-resilient run", &sc, &ex);
        }
        if (!l_resilient && ex.incomplete()) ++incomplete_unsafe;
      }
    }
  }
  s.stats()["incomplete_non_resilient"] = incomplete_unsafe;
  return s.finish();
}

Report suite_as(const SuiteParams& p) {
  Suite s("as", p);
  if (p.j < 1) throw ConfigError("as needs j >= 1");
  int max_ip = 0;
  for (int i = 0; i < p.cases; ++i) {
    ASFuzzOptions o;
    o.j = p.j;
    o.positions = p.positions;
    o.moves = p.moves;
    o.simulators = std::max(2, p.n);
    o.seed = p.seed * 1000003ULL + static_cast<std::uint64_t>(i);
    const auto r = as_fuzz_run(o);
    s.count();
    max_ip = std::max(max_ip, r.max_ip);
    if (r.violation) s.violation("safety", "seed " + std::to_string(o.seed) + ": " + r.detail);
  }
  s.stats()["max_ip"] = max_ip;
  return s.finish();
}

Report suite_hs(const SuiteParams& p) {
  Suite s("hs", p);
  if (p.n < 1 || p.n > 16) throw ConfigError("hs supports 1 <= n <= 16");
  std::mt19937_64 rng(p.seed);
  for (int i = 0; i < p.cases; ++i) {
    const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(p.n));
    const Adversary adv = random_adversary(rng(), n, 8);
    ProcessSet universe = ProcessSet::full(n);
    if (rng() % 3 == 0) universe = ProcessSet::from_bits(rng() & ((std::uint64_t{1} << n) - 1));
    const auto expected = naive_min_hitting_sets(adv.live_sets(), universe);
    s.count();
    std::string got;
    try {
      const auto r = min_hitting_sets(adv, universe);
      if (expected.empty()) {
        got = "solver returned a result for an empty restriction";
      } else if (r.witnesses != expected || r.h != expected.front().size()) {
        got = "solver disagrees with enumeration (h " + std::to_string(r.h) + " vs " +
              std::to_string(expected.front().size()) + ")";
      }
    } catch (const EmptyRestriction&) {
      if (!expected.empty()) got = "solver reported an empty restriction";
    }
    if (!got.empty()) s.violation("safety", adv.to_json().dump() + " universe " + universe.to_string() + ": " + got);
  }
  return s.finish();
}

/// Nested id sets S_1 < ... < S_j with h(S_i) >= i, each containing a live set.
std::optional<std::vector<ProcessSet>> nested_chain(std::mt19937_64& rng, const Adversary& adv, int j) {
  const auto& live = adv.live_sets();
  ProcessSet current = live[rng() % live.size()];
  std::vector<ProcessSet> chain{current};
  while (static_cast<int>(chain.size()) < j) {
    const auto rest = (adv.universe() - current).members();
    if (rest.empty()) return std::nullopt;
    current.insert(rest[rng() % rest.size()]);
    if (hitting_set_size(adv, current) >= static_cast<int>(chain.size()) + 1) chain.push_back(current);
  }
  return chain;
}

Report suite_tl(const SuiteParams& p) {
  Suite s("tl", p);
  const Adversary adv = p.adv ? *p.adv : t_resilient_adversary(4, 2);
  const int n = adv.n();
  const int h = classify(adv);
  if (p.j < 1 || p.j > h) throw ConfigError("tl needs 1 <= j <= h(Pi, L) = " + std::to_string(h));
  const TLTask tl{p.task.empty() ? k_set_agreement(n, h) : task_from_name(p.task, n), adv};
  const Adversary wf = wait_free_adversary(n);
  std::mt19937_64 rng(p.seed);
  int max_blocked = 0;
  int max_ip = 0;
  for (int i = 0; i < p.cases; ++i) {
    TaskVector base;
    for (int q = 0; q < n; ++q) base.push_back(Value::integer(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n))));
    const auto chain = nested_chain(rng, adv, p.j);
    if (!chain) throw ConfigError("cannot build nested inputs for j = " + std::to_string(p.j));
    std::vector<int> which(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) which[static_cast<std::size_t>(q)] = q < p.j ? q : static_cast<int>(rng() % static_cast<std::uint64_t>(p.j));
    std::shuffle(which.begin(), which.end(), rng);
    ImageVector inputs;
    for (int q = 0; q < n; ++q) inputs.push_back(image_of(base, (*chain)[static_cast<std::size_t>(which[static_cast<std::size_t>(q)])]));
    Scenario sc = scenario_of("tl", adv, inputs);

    // Odd cases use an unstructured interleaving without crashes; it reaches
    // contended positions far more often than round-robin.
    auto crash = random_crash_schedule(rng(), ProcessSet::full(n), wf, true, 400);
    std::unique_ptr<Schedule> schedule;
    if (i % 2 == 1) {
      crash.correct = ProcessSet::full(n);
      schedule = std::make_unique<RandomSchedule>(rng());
    } else {
      schedule = std::make_unique<FairSchedule>(crash.schedule());
    }
    const auto r = simulate_tl(adv, hs_ksa_protocol(adv), inputs, *schedule, p.budget);
    s.count();
    const auto posted = masked(inputs, r.execution.participants);
    std::set<Value> distinct;
    for (const auto& v : posted) {
      if (!v.is_bottom()) distinct.insert(v);
    }
    const int j_run = static_cast<int>(distinct.size());
    const int blocked = static_cast<int>(r.diagnostics.blocked.size());
    max_blocked = std::max(max_blocked, blocked);
    max_ip = std::max(max_ip, r.max_ip);
    if (r.monitor_violation) s.violation("safety", "IP bound: " + *r.monitor_violation, &sc, &r.execution);
    if (blocked > std::max(j_run - 1, 0)) {
      s.violation("safety", std::to_string(blocked) + " blocked codes with " + std::to_string(j_run) + " distinct inputs",
                  &sc, &r.execution);
    }
    if (!crash.correct.subset_of(r.execution.terminated())) {
      s.violation("liveness", "a correct simulator did not return", &sc, &r.execution);
    }
    const bool any = std::any_of(r.outputs.begin(), r.outputs.end(), [](const Value& v) { return !v.is_bottom(); });
    if (any) {
      const auto check = validate_tl_output(tl, posted, r.outputs);
      if (!check.ok()) {
        s.violation("safety", std::string("T_L output rejected: ") + tl_reason_name(check.reason) + " " + check.detail,
                    &sc, &r.execution);
      }
    }
  }
  s.stats()["max_blocked"] = max_blocked;
  s.stats()["max_ip"] = max_ip;
  return s.finish();
}

Report suite_bg(const SuiteParams& p) {
  Suite s("bg", p);
  const Adversary adv = p.adv ? *p.adv : Adversary(4, {ProcessSet::from_bits(3), ProcessSet::from_bits(12)});
  const int n = adv.n();
  const int h = classify(adv);
  if (h >= n) throw ConfigError("bg needs h(Pi, L) < n");
  const ProcessSet hitters = resolver_set_for(adv, adv.universe());
  std::mt19937_64 rng(p.seed);
  int unsafe_crashes = 0;
  int max_blocked = 0;
  for (int i = 0; i < p.cases; ++i) {
    std::vector<int> in;
    for (int q = 0; q < n; ++q) in.push_back(10 + static_cast<int>(rng() % static_cast<std::uint64_t>(n)));
    Scenario sc = scenario_of("bg", adv, int_values(in));
    sc.t = h - 1;
    auto crash = random_crash_schedule(rng(), ProcessSet::full(n), adv, true, 300);
    // Half of the runs crash a faulty simulator inside a safe-agreement window.
    const auto faulty_sims = (hitters - crash.correct).members();
    if (!faulty_sims.empty() && i % 2 == 0) {
      const int victim = faulty_sims[rng() % faulty_sims.size()];
      crash.plan.crash_slot.erase(victim);
      crash.plan.crash_label[victim] = "sa-unsafe";
      crash.plan.label_after_steps[victim] = static_cast<std::int64_t>(rng() % 40);
      ++unsafe_crashes;
    }
    FairSchedule schedule = crash.schedule();
    const auto r = bg_simulate(adv, wait_min_protocol(n, h - 1), sc.inputs, schedule, p.budget);
    s.count();
    std::set<Value> distinct;
    for (const auto& v : r.outputs) {
      if (v.is_bottom()) continue;
      distinct.insert(v);
      if (std::find(sc.inputs.begin(), sc.inputs.end(), v) == sc.inputs.end()) {
        s.violation("safety", "output " + v.to_string() + " is not an input", &sc, &r.execution);
      }
    }
    max_blocked = std::max(max_blocked, static_cast<int>(r.blocked.size()));
    if (static_cast<int>(distinct.size()) > h) {
      s.violation("safety", std::to_string(distinct.size()) + " distinct outputs exceed h", &sc, &r.execution);
    }
    if (static_cast<int>(r.blocked.size()) > h - 1) {
      s.violation("safety", std::to_string(r.blocked.size()) + " blocked codes exceed h - 1", &sc, &r.execution);
    }
    if (!crash.correct.subset_of(r.execution.terminated())) {
      s.violation("liveness", "a correct process did not output", &sc, &r.execution);
    }
  }
  s.stats()["unsafe_crash_runs"] = unsafe_crashes;
  s.stats()["max_blocked"] = max_blocked;
  return s.finish();
}

Report suite_e2e(const SuiteParams& p) {
  Suite s("e2e", p);
  const Adversary adv = p.adv ? *p.adv : Adversary(4, {ProcessSet::from_bits(3), ProcessSet::from_bits(12)});
  const int n = adv.n();
  const int h = classify(adv);
  const TaskSpec task = p.task.empty() ? k_set_agreement(n, h) : task_from_name(p.task, n);
  std::mt19937_64 rng(p.seed);
  std::size_t most_distinct = 0;
  for (int i = 0; i < p.cases; ++i) {
    std::vector<int> in;
    for (int q = 0; q < n; ++q) in.push_back(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n)));
    Scenario sc = scenario_of("e2e", adv, int_values(in));
    const auto crash = random_crash_schedule(rng(), ProcessSet::full(n), adv, true, 400);
    FairSchedule schedule = crash.schedule();
    const auto ex = run(build_programs(sc), schedule, p.budget);
    s.count();
    const auto posted = posted_outputs(ex.memory, n, "e2e");
    const auto input = masked(sc.inputs, ex.participants);
    std::set<Value> distinct;
    for (const auto& v : posted) {
      if (!v.is_bottom()) distinct.insert(v);
    }
    most_distinct = std::max(most_distinct, distinct.size());
    if (!task.accepts(input, posted)) s.violation("safety", "posted outputs are not in Delta", &sc, &ex);
    if (!weakly_solved(task, adv, input, posted, ex.participants)) {
      s.violation("liveness", "no participating live set obtained outputs", &sc, &ex);
    }
    if (!crash.correct.subset_of(ex.terminated())) {
      s.violation("liveness", "a correct process did not return", &sc, &ex);
    }
  }
  s.stats()["max_distinct_outputs"] = most_distinct;
  return s.finish();
}

}  // namespace

Report run_suite(const std::string& name, const SuiteParams& params) {
  if (params.cases < 0) throw ConfigError("cases must be >= 0");
  if (params.budget <= 0) throw ConfigError("budget must be positive");
  const auto start = std::chrono::steady_clock::now();
  Report report;
  try {
    if (name == "ca") {
      report = suite_ca(params);
    } else if (name == "rap") {
      report = suite_rap(params);
    } else if (name == "doorway") {
      report = suite_doorway(params);
    } else if (name == "as") {
      report = suite_as(params);
    } else if (name == "hs") {
      report = suite_hs(params);
    } else if (name == "tl") {
      report = suite_tl(params);
    } else if (name == "bg") {
      report = suite_bg(params);
    } else if (name == "e2e") {
      report = suite_e2e(params);
    } else {
      throw ConfigError("unknown suite: " + name + " (expected ca, rap, doorway, as, hs, tl, bg or e2e)");
    }
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  } catch (const EmptyRestriction& e) {
    throw ConfigError(e.what());
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace hitset
