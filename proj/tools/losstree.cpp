// Copyright 2026 The losstree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// losstree: command-line front end.
//
//   losstree prob      --b 2,2,2 --eps0 0.2
//   losstree optimize  --eps0 0.2 --target 1e-6
//   losstree sweep     --eps0 0.2,0.3,0.4,0.49 --targets 1e-2,1e-4,1e-6 --output curves.csv
//   losstree simulate  --b 4,7,3 --eps0 0.3 --trials 1000000 --seed 7
//   losstree verify    --seed 1 --sizes 12
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 infeasible (optimize --strict), 4 capacity error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "losstree/analytics.hpp"
#include "losstree/optimizer.hpp"
#include "losstree/parallel.hpp"
#include "losstree/report.hpp"
#include "losstree/rule_suite.hpp"
#include "losstree/simulator.hpp"

namespace {

using namespace losstree;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitCapacity = 4;

struct OutputOptions {
  std::string format = "json";
  std::string path;
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--format", out.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output,-o", out.path, "Write to this file (atomically) instead of stdout");
}

void emit(const Table& table, const OutputOptions& out) {
  const std::string text = render(table, parse_format(out.format));
  if (out.path.empty()) {
    std::cout << text;
  } else {
    write_atomically(out.path, text);
  }
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      throw InvalidInput(std::string("malformed ") + what + " list '" + text + "'");
    }
    while (used < field.size() && field[used] == ' ') ++used;
    if (used != field.size()) throw InvalidInput(std::string("malformed ") + what + " list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidInput(std::string(what) + " list is empty");
  return out;
}

std::vector<int> to_ints(const BranchingVector& b) { return {b.values().begin(), b.values().end()}; }

struct BoundsFlags {
  SearchBounds bounds;
  bool heuristic = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--max-depth", bounds.max_depth, "Largest depth index m")->capture_default_str();
    cmd->add_option("--max-branch", bounds.max_branch, "Largest branching parameter")->capture_default_str();
    cmd->add_option("--max-qubits", bounds.max_qubits, "Largest tree size Q")->capture_default_str();
    cmd->add_flag("--heuristic", heuristic, "Scan (b0, c, ..., c) vectors only; fast, not guaranteed minimal");
  }
  [[nodiscard]] SearchMode mode() const { return heuristic ? SearchMode::heuristic : SearchMode::exhaustive; }
};

Row optimization_row(double eps0, double target, const OptimizationResult* r, const std::string& error) {
  Row row;
  row.set("eps0", eps0).set("target", target);
  if (r == nullptr) {
    row.set("feasible", false).set("b", std::monostate{}).set("Q", std::monostate{});
    row.set("achieved_eps_eff", std::monostate{}).set("evaluated", std::monostate{});
  } else {
    row.set("feasible", r->feasible);
    if (r->feasible) {
      row.set("b", to_ints(*r->best)).set("Q", r->Q).set("achieved_eps_eff", r->achieved_eps_eff);
    } else {
      row.set("b", std::monostate{}).set("Q", std::monostate{}).set("achieved_eps_eff", std::monostate{});
    }
    row.set("evaluated", r->evaluated);
  }
  row.set("mode", std::string(r && r->mode == SearchMode::heuristic ? "heuristic" : "exhaustive"));
  row.set("error", error.empty() ? Cell{std::monostate{}} : Cell{error});
  return row;
}

// Sweep configuration file: a JSON object with only these keys.
void apply_config(const std::string& path, std::vector<double>& eps0, std::vector<double>& targets,
                  BoundsFlags& flags, OutputOptions& out, const CLI::App& cmd) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot read config '" + path + "'");
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw InvalidInput("config must be a JSON object");
  static const std::set<std::string> known{"eps0",      "targets", "max_depth", "max_branch",
                                           "max_qubits", "mode",    "format",    "output"};
  for (const auto& [key, _] : cfg.items())
    if (!known.count(key)) throw InvalidInput("unknown config key '" + key + "'");
  try {
    // Explicit command-line flags win over the file.
    if (cfg.contains("eps0") && !cmd.count("--eps0")) eps0 = cfg["eps0"].get<std::vector<double>>();
    if (cfg.contains("targets") && !cmd.count("--targets")) targets = cfg["targets"].get<std::vector<double>>();
    if (cfg.contains("max_depth") && !cmd.count("--max-depth")) flags.bounds.max_depth = cfg["max_depth"].get<int>();
    if (cfg.contains("max_branch") && !cmd.count("--max-branch"))
      flags.bounds.max_branch = cfg["max_branch"].get<int>();
    if (cfg.contains("max_qubits") && !cmd.count("--max-qubits"))
      flags.bounds.max_qubits = cfg["max_qubits"].get<std::uint64_t>();
    if (cfg.contains("mode") && !cmd.count("--heuristic")) {
      const auto mode = cfg["mode"].get<std::string>();
      if (mode != "exhaustive" && mode != "heuristic") throw InvalidInput("mode must be exhaustive or heuristic");
      flags.heuristic = mode == "heuristic";
    }
    if (cfg.contains("format") && !cmd.count("--format")) out.format = cfg["format"].get<std::string>();
    if (cfg.contains("output") && !cmd.count("--output")) out.path = cfg["output"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad config value: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loss-tolerance toolkit for tree-encoded cluster states"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: $LOSSTREE_THREADS, else all cores)");

  // prob
  auto* prob = app.add_subcommand("prob", "Success probability and R_k of a branching vector");
  std::string prob_b;
  double prob_eps = 0.0;
  OutputOptions prob_out;
  prob->add_option("--b", prob_b, "Branching vector, e.g. 2,2,2")->required();
  prob->add_option("--eps0", prob_eps, "Per-qubit loss probability")->required();
  add_output_flags(prob, prob_out);

  // optimize
  auto* opt = app.add_subcommand("optimize", "Smallest tree reaching a target effective loss");
  double opt_eps = 0.0, opt_target = 0.0;
  bool strict = false;
  BoundsFlags opt_bounds;
  OutputOptions opt_out;
  opt->add_option("--eps0", opt_eps, "Per-qubit loss probability")->required();
  opt->add_option("--target", opt_target, "Target effective loss rate")->required();
  opt->add_flag("--strict", strict, "Exit with code 3 when no tree reaches the target");
  opt_bounds.add(opt);
  add_output_flags(opt, opt_out);

  // sweep
  auto* sw = app.add_subcommand("sweep", "optimize over an eps0 x target grid");
  std::string sw_eps_text, sw_targets_text, sw_config;
  BoundsFlags sw_bounds;
  OutputOptions sw_out;
  sw_out.format = "csv";
  sw->add_option("--eps0", sw_eps_text, "Comma-separated eps0 values");
  sw->add_option("--targets", sw_targets_text, "Comma-separated target values");
  sw->add_option("--config", sw_config, "JSON run configuration");
  sw_bounds.add(sw);
  add_output_flags(sw, sw_out);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate against the closed form");
  std::string sim_b;
  double sim_eps = 0.0;
  std::uint64_t trials = 1'000'000, seed = 1;
  OutputOptions sim_out;
  sim->add_option("--b", sim_b, "Branching vector")->required();
  sim->add_option("--eps0", sim_eps, "Per-qubit loss probability")->required();
  sim->add_option("--trials", trials, "Number of trials")->capture_default_str();
  sim->add_option("--seed", seed, "RNG seed")->capture_default_str();
  add_output_flags(sim, sim_out);

  // verify
  auto* ver = app.add_subcommand("verify", "Randomized stabilizer checks of the measurement rules");
  std::uint64_t ver_seed = 1;
  std::size_t sizes = 12, instances = 500;
  bool corrupt = false;
  OutputOptions ver_out;
  ver->add_option("--seed", ver_seed, "RNG seed")->capture_default_str();
  ver->add_option("--sizes", sizes, "Largest instance size in qubits")->capture_default_str();
  ver->add_option("--instances", instances, "Instances per rule")->capture_default_str();
  ver->add_flag("--corrupt-sign", corrupt, "Self-test: flip stabilizer signs so every suite must fail");
  add_output_flags(ver, ver_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  if (threads == 0) threads = default_thread_count();

  try {
    if (*prob) {
      const auto b = BranchingVector::parse(prob_b);
      const auto rep = logical_success(b, LossRate(prob_eps));
      Row row;
      row.set("b", to_ints(b)).set("eps0", prob_eps).set("Q", qubit_count(b));
      row.set("P", rep.P).set("eps_eff", rep.eps_eff).set("R", rep.R);
      emit({row}, prob_out);
      return 0;
    }
    if (*opt) {
      const auto r = optimize_tree(LossRate(opt_eps), opt_target, opt_bounds.bounds, opt_bounds.mode());
      emit({optimization_row(opt_eps, opt_target, &r, "")}, opt_out);
      return strict && !r.feasible ? kExitInfeasible : 0;
    }
    if (*sw) {
      std::vector<double> eps0, targets;
      if (!sw_config.empty()) apply_config(sw_config, eps0, targets, sw_bounds, sw_out, *sw);
      if (!sw_eps_text.empty()) eps0 = parse_double_list(sw_eps_text, "eps0");
      if (!sw_targets_text.empty()) targets = parse_double_list(sw_targets_text, "target");
      parse_format(sw_out.format);
      const auto rows = sweep(eps0, targets, sw_bounds.bounds, sw_bounds.mode(), threads);
      Table table;
      for (const auto& row : rows)
        table.push_back(optimization_row(row.eps0, row.target, row.result ? &*row.result : nullptr, row.error));
      emit(table, sw_out);
      return 0;
    }
    if (*sim) {
      const auto b = BranchingVector::parse(sim_b);
      const LossRate eps(sim_eps);
      const TreeGraph tree(b);
      const auto mc = estimate_success(tree, eps, trials, seed, threads);
      const double P = logical_success(b, eps).P;
      Cell z = std::monostate{};
      if (mc.std_error > 0.0) {
        z = (mc.estimate - P) / mc.std_error;
      } else if (mc.estimate == P) {
        z = 0.0;
      }
      Row row;
      row.set("b", to_ints(b)).set("eps0", sim_eps).set("trials", trials).set("seed", seed);
      row.set("estimate", mc.estimate).set("std_error", mc.std_error).set("P", P).set("z_score", z);
      emit({row}, sim_out);
      return 0;
    }
    if (*ver) {
      RuleSuiteConfig cfg;
      cfg.seed = ver_seed;
      cfg.max_qubits = sizes;
      cfg.instances = instances;
      cfg.options.corrupt_signs = corrupt;
      const auto results = run_rule_suites(cfg);
      Table table;
      bool all = true;
      for (const auto& r : results) {
        Row row;
        row.set("rule", r.rule).set("instances", static_cast<std::uint64_t>(r.instances));
        row.set("passed", static_cast<std::uint64_t>(r.passed)).set("status", std::string(r.ok() ? "pass" : "fail"));
        table.push_back(std::move(row));
        all = all && r.ok();
      }
      emit(table, ver_out);
      return all ? 0 : kExitFailure;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
