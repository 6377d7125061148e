#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hitset/adversary.hpp"
#include "hitset/assim.hpp"
#include "hitset/bgsim.hpp"
#include "hitset/errors.hpp"
#include "hitset/harness.hpp"
#include "hitset/tasks.hpp"
#include "hitset/version.hpp"

using nlohmann::json;
using namespace hitset;

namespace {

// Inline JSON if it looks like JSON, a file path otherwise.
json load_json(const std::string& spec, const char* what) {
  std::string text = spec;
  const auto start = spec.find_first_not_of(" \t\r\n");
  if (start == std::string::npos || (spec[start] != '{' && spec[start] != '[')) {
    std::ifstream in(spec);
    if (!in) throw ConfigError(std::string("cannot read ") + what + " file " + spec);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad ") + what + ": " + e.what());
  }
}

Adversary load_adversary(const std::string& spec) {
  try {
    return Adversary::from_json(load_json(spec, "adversary"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad adversary: ") + e.what());
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("bad adversary: ") + e.what());
  }
}

std::vector<Value> load_values(const std::string& spec, int n) {
  const json j = load_json(spec, "inputs");
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ConfigError("inputs must be a JSON array with one entry per process (" + std::to_string(n) + ")");
  }
  std::vector<Value> out;
  try {
    for (const auto& v : j) out.push_back(Value::from_json(v));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return out;
}

json values_json(const std::vector<Value>& xs) {
  json out = json::array();
  for (const auto& v : xs) out.push_back(v.to_json());
  return out;
}

json outputs_json(const Execution& ex) {
  json out = json::array();
  for (const auto& o : ex.outputs) out.push_back(o ? o->to_json() : json(nullptr));
  return out;
}

json execution_json(const Execution& ex) {
  return {{"status", run_status_name(ex.status)},
          {"events", ex.trace.size()},
          {"participants", ex.participants.members()},
          {"terminated", ex.terminated().members()},
          {"outputs", outputs_json(ex)}};
}

void maybe_trace(const std::string& path, const Scenario& sc, const Execution& ex) {
  if (!path.empty()) write_trace_file(path, trace_meta(sc), ex.trace);
}

int status_exit(const Execution& ex) { return ex.incomplete() ? kExitLiveness : kExitPass; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hitting-set classification of fair adversaries: solvers, simulations and checkers"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // adv hs
  auto* adv_cmd = app.add_subcommand("adv", "Adversary utilities");
  adv_cmd->require_subcommand(1);
  auto* hs_cmd = adv_cmd->add_subcommand("hs", "Minimum hitting sets of an adversary");
  std::string adv_spec;
  std::string universe_spec;
  hs_cmd->add_option("--adv,--spec", adv_spec, "Adversary JSON or file: {\"n\":4,\"live_sets\":[[0,1],[2,3]]}")->required();
  hs_cmd->add_option("--universe", universe_spec, "Restrict to these processes, e.g. 0,1,3");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one protocol under a schedule");
  Scenario scenario;
  std::string inputs_spec;
  std::string schedule_spec;
  std::string trace_path;
  std::int64_t budget = kDefaultBudget;
  std::map<int, std::int64_t> resolve_after;
  run_cmd->add_option("--protocol", scenario.protocol, "ca | rap | doorway | hs-ksa | wait-min | tl | bg | e2e")
      ->required()
      ->check(CLI::IsMember({"ca", "rap", "doorway", "hs-ksa", "wait-min", "tl", "bg", "e2e"}));
  run_cmd->add_option("--adv", adv_spec, "Adversary JSON or file")->required();
  run_cmd->add_option("--inputs", inputs_spec, "JSON array of inputs, null for non-participants")->required();
  run_cmd->add_option("--schedule", schedule_spec, "Schedule JSON or file (default: random seed 1)");
  run_cmd->add_option("--budget", budget, "Step budget")->check(CLI::PositiveNumber);
  run_cmd->add_option("--trace", trace_path, "Write a replayable JSONL trace here");
  run_cmd->add_option("--t", scenario.t, "wait-min / bg resilience");
  run_cmd->add_option("--codes", scenario.codes, "bg: number of simulated codes");
  run_cmd->add_option("--resolve-after", resolve_after, "rap: PID STEPS pairs");

  // explore
  auto* explore_cmd = app.add_subcommand("explore", "Enumerate every interleaving of a protocol");
  ExploreOptions explore_options;
  explore_cmd->add_option("--protocol", scenario.protocol, "ca | rap | hs-ksa | wait-min")->required();
  explore_cmd->add_option("--adv", adv_spec, "Adversary JSON or file")->required();
  explore_cmd->add_option("--inputs", inputs_spec, "JSON array of inputs")->required();
  explore_cmd->add_option("--depth", explore_options.depth, "Maximum steps per interleaving");
  explore_cmd->add_option("--max-states", explore_options.max_states, "State limit");
  explore_cmd->add_option("--t", scenario.t, "wait-min resilience");

  // check
  auto* check_cmd = app.add_subcommand("check", "Run a property suite and print a JSON report");
  std::string suite;
  SuiteParams params;
  check_cmd->add_option("--suite", suite, "ca | rap | doorway | as | hs | tl | bg | e2e")->required();
  check_cmd->add_option("--n", params.n, "Number of processes");
  check_cmd->add_option("--cases,--schedules", params.cases, "Number of cases");
  check_cmd->add_option("--seed", params.seed, "Seed");
  check_cmd->add_option("--mode", params.mode, "random | exhaustive")->check(CLI::IsMember({"random", "exhaustive"}));
  check_cmd->add_option("--j", params.j, "as: BatchU budget; tl: distinct inputs");
  check_cmd->add_option("--positions", params.positions, "as: number of positions");
  check_cmd->add_option("--moves", params.moves, "as: scheduler events per run");
  check_cmd->add_option("--budget", params.budget, "Step budget per run");
  check_cmd->add_option("--adv", adv_spec, "Adversary JSON or file (suite default otherwise)");
  check_cmd->add_option("--task", params.task, "Task name, e.g. ksa:2 or consensus");
  check_cmd->add_option("--trace-dir", params.trace_dir, "Directory for counterexample traces");

  // simulate-tl
  auto* tl_cmd = app.add_subcommand("simulate-tl", "Simulate the companion task with hs-ksa as the base protocol");
  std::string task_name;
  tl_cmd->add_option("--adv", adv_spec, "Adversary JSON or file")->required();
  tl_cmd->add_option("--task", task_name, "Task used to validate the outputs (default ksa:h)");
  tl_cmd->add_option("--inputs", inputs_spec, "JSON array of input images [[pid, value], ...] or null")->required();
  tl_cmd->add_option("--schedule", schedule_spec, "Schedule JSON or file");
  tl_cmd->add_option("--budget", budget, "Step budget")->check(CLI::PositiveNumber);
  tl_cmd->add_option("--trace", trace_path, "Write a replayable JSONL trace here");

  // bgsim
  auto* bg_cmd = app.add_subcommand("bgsim", "BG-simulate wait-min(h - 1) with the hitting-set simulators");
  bg_cmd->add_option("--adv", adv_spec, "Adversary JSON or file")->required();
  bg_cmd->add_option("--task", task_name, "ksa:K with K >= h (default ksa:h)");
  bg_cmd->add_option("--inputs", inputs_spec, "JSON array of inputs")->required();
  bg_cmd->add_option("--schedule", schedule_spec, "Schedule JSON or file");
  bg_cmd->add_option("--budget", budget, "Step budget")->check(CLI::PositiveNumber);
  bg_cmd->add_option("--trace", trace_path, "Write a replayable JSONL trace here");

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Re-execute a trace file and compare byte for byte");
  std::string replay_path;
  replay_cmd->add_option("file", replay_path, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (hs_cmd->parsed()) {
      const Adversary adv = load_adversary(adv_spec);
      const ProcessSet universe = universe_spec.empty() ? adv.universe() : parse_process_list(universe_spec);
      const auto r = min_hitting_sets(adv, universe);
      json witnesses = json::array();
      for (const auto& w : r.witnesses) witnesses.push_back(w.members());
      std::cout << json{{"h", r.h}, {"witnesses", witnesses}}.dump() << '\n';
      return kExitPass;
    }

    if (run_cmd->parsed() || explore_cmd->parsed()) {
      scenario.adv = load_adversary(adv_spec);
      scenario.inputs = load_values(inputs_spec, scenario.n());
      scenario.resolve_after = resolve_after;
      const auto programs = build_programs(scenario);
      if (explore_cmd->parsed()) {
        const auto report = explore(programs, explore_options, {});
        std::cout << json{{"interleavings", report.interleavings},
                          {"states", report.states},
                          {"terminal_states", report.terminal_states},
                          {"depth_cut_states", report.depth_cut_states},
                          {"resource_limit", report.resource_limit}}
                         .dump()
                  << '\n';
        return report.resource_limit ? kExitLiveness : kExitPass;
      }
      auto schedule = parse_schedule(schedule_spec.empty() ? R"({"random":1})" : schedule_spec, scenario.n());
      const auto ex = run(programs, *schedule, budget);
      maybe_trace(trace_path, scenario, ex);
      std::cout << execution_json(ex).dump() << '\n';
      return status_exit(ex);
    }

    if (check_cmd->parsed()) {
      if (!adv_spec.empty()) params.adv = load_adversary(adv_spec);
      const auto report = run_suite(suite, params);
      std::cout << report.to_json().dump(2) << '\n';
      return report.exit_code();
    }

    if (tl_cmd->parsed()) {
      const Adversary adv = load_adversary(adv_spec);
      const int n = adv.n();
      const TaskSpec task = task_from_name(task_name.empty() ? "ksa:" + std::to_string(classify(adv)) : task_name, n);
      scenario = Scenario{};
      scenario.protocol = "tl";
      scenario.adv = adv;
      scenario.inputs = load_values(inputs_spec, n);
      for (const auto& entry : scenario.inputs) {
        if (!entry.is_bottom() && image_ids(entry).empty()) throw ConfigError("input " + entry.to_string() + " is not an image");
      }
      auto schedule = parse_schedule(schedule_spec.empty() ? R"({"random":1})" : schedule_spec, n);
      const auto r = simulate_tl(adv, hs_ksa_protocol(adv), scenario.inputs, *schedule, budget);
      maybe_trace(trace_path, scenario, r.execution);
      json out = execution_json(r.execution);
      out["images"] = values_json(r.outputs);
      out["max_ip"] = r.max_ip;
      out["blocked_codes"] = r.diagnostics.blocked;
      int code = status_exit(r.execution);
      if (r.monitor_violation) {
        out["violation"] = *r.monitor_violation;
        code = kExitViolation;
      }
      std::vector<Value> posted(static_cast<std::size_t>(n));
      for (int p : r.execution.participants.members()) posted[static_cast<std::size_t>(p)] = scenario.inputs[static_cast<std::size_t>(p)];
      const bool any = std::any_of(r.outputs.begin(), r.outputs.end(), [](const Value& v) { return !v.is_bottom(); });
      if (any) {
        const auto check = validate_tl_output(TLTask{task, adv}, posted, r.outputs);
        out["valid"] = check.ok();
        if (!check.ok()) {
          out["reason"] = std::string(tl_reason_name(check.reason)) + " " + check.detail;
          code = kExitViolation;
        }
      }
      std::cout << out.dump() << '\n';
      return code;
    }

    if (bg_cmd->parsed()) {
      const Adversary adv = load_adversary(adv_spec);
      const int n = adv.n();
      const int h = classify(adv);
      const std::string name = task_name.empty() ? "ksa:" + std::to_string(h) : task_name;
      const TaskSpec task = task_from_name(name, n);
      if (name.rfind("ksa:", 0) != 0) throw ConfigError("bgsim supports ksa:K tasks only");
      const int k = std::stoi(name.substr(4));
      if (k < h) throw ConfigError(name + " is below h = " + std::to_string(h) + "; not solvable under this adversary");
      if (h >= n) throw ConfigError("bgsim needs h < n");
      scenario = Scenario{};
      scenario.protocol = "bg";
      scenario.adv = adv;
      scenario.t = h - 1;
      scenario.inputs = load_values(inputs_spec, n);
      auto schedule = parse_schedule(schedule_spec.empty() ? R"({"random":1})" : schedule_spec, n);
      const auto r = bg_simulate(adv, wait_min_protocol(n, h - 1), scenario.inputs, *schedule, budget);
      maybe_trace(trace_path, scenario, r.execution);
      json out = execution_json(r.execution);
      out["simulators"] = r.simulators.members();
      out["blocked_codes"] = r.blocked;
      const bool accepted = task.accepts(scenario.inputs, r.outputs);
      out["valid"] = accepted;
      std::cout << out.dump() << '\n';
      if (!accepted) return kExitViolation;
      return status_exit(r.execution);
    }

    if (replay_cmd->parsed()) {
      const auto r = replay_trace_file(replay_path);
      json out = {{"identical", r.identical}, {"events", r.execution.trace.size()}};
      if (!r.identical) out["detail"] = r.detail;
      std::cout << out.dump() << '\n';
      return r.identical ? kExitPass : kExitViolation;
    }
  } catch (const ConfigError& e) {
    std::cerr << "hitset: " << e.what() << '\n';
    return kExitConfig;
  } catch (const EmptyRestriction& e) {
    std::cerr << "hitset: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidParameter& e) {
    std::cerr << "hitset: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ProtocolFault& e) {
    std::cerr << "hitset: protocol fault: " << e.what() << '\n';
    return kExitViolation;
  }
  return kExitPass;
}
