// Command-line front end: gen, solve, sweep, table, oracle.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pwalloc/harness.hpp"

namespace {

using namespace pwalloc;

struct Flags {
  std::vector<int> n;
  std::vector<double> c;
  std::uint64_t seed = 1;
  double pmax = 10.0;
  int reps = 1;
  std::string mode;
  bool clamp = true;
  std::string out;
  double budget = 0.0;
  int threads = 1;
  std::string config;
  std::string instance;
  std::string emit_dot;
  bool timings = false;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << text;
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return Json::parse(f);
}

// Config file first, then every flag the user actually passed.
ExperimentConfig build_config(const Flags& flags, const CLI::App& app, ExperimentConfig base) {
  auto given = [&app](const std::string& name) {
    const CLI::Option* o = app.get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (!flags.config.empty()) base = config_from_json(read_json_file(flags.config), base);
  if (given("--n")) base.n_values = flags.n;
  if (given("--c")) base.c_values = flags.c;
  if (given("--seed")) base.seed = flags.seed;
  if (given("--pmax")) base.peak_power = flags.pmax;
  if (given("--reps")) base.replications = flags.reps;
  if (given("--clamp")) base.clamp_at_zero = flags.clamp;
  if (given("--out")) base.out_path = flags.out;
  if (given("--budget-secs")) base.budget_seconds = flags.budget;
  if (given("--threads")) base.threads = flags.threads;
  if (given("--mode")) {
    base.mode = flags.mode == "noisy" ? Mode::noisy : Mode::noiseless;
  }
  base.record_timings = flags.timings;
  validate(base);
  return base;
}

NetworkInstance load_instance(const Flags& flags, const ExperimentConfig& config) {
  if (!flags.instance.empty()) return instance_from_json(read_json_file(flags.instance));
  return generate_network(config.n_values.front(), config.c_values.front(), config.seed);
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--n", f.n, "Source counts (comma separated for sweeps)")->delimiter(',');
  cmd->add_option("--c", f.c, "Correlation parameters (comma separated for sweeps)")->delimiter(',');
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--out", f.out, "Output path (stdout when omitted)");
  cmd->add_option("--config", f.config, "JSON config; flags override it");
  cmd->add_option("--threads", f.threads, "Worker threads");
}

void add_noisy(CLI::App* cmd, Flags& f) {
  cmd->add_option("--pmax", f.pmax, "Peak power per node");
  cmd->add_option("--clamp", f.clamp, "Floor rates at zero before power conversion (true/false)");
  cmd->add_option("--budget-secs", f.budget, "Matching forest search budget in seconds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairwise distributed source coding rate and power allocation"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("gen", "Generate a seeded network instance as JSON");
  add_common(gen, f);

  auto* solve = app.add_subcommand("solve", "Solve one instance and print a JSON report");
  add_common(solve, f);
  add_noisy(solve, f);
  solve->add_option("--mode", f.mode, "noiseless or noisy")
      ->check(CLI::IsMember({"noiseless", "noisy"}));
  solve->add_option("--instance", f.instance, "Instance JSON instead of --n/--c/--seed");
  solve->add_option("--emit-dot", f.emit_dot, "Write the optimal witness as a DOT graph");
  solve->add_flag("--timings", f.timings, "Include wall-clock seconds per method");

  auto* sweep = app.add_subcommand("sweep", "Normalized sum-rate sweep over n and c (CSV)");
  add_common(sweep, f);
  sweep->add_option("--reps", f.reps, "Replications per cell");
  sweep->add_option("--mode", f.mode, "must be noiseless")->check(CLI::IsMember({"noiseless"}));

  auto* table = app.add_subcommand("table", "Noisy sum-power comparison table (CSV)");
  add_common(table, f);
  add_noisy(table, f);
  table->add_option("--reps", f.reps, "Replications per cell");
  table->add_option("--mode", f.mode, "must be noisy")->check(CLI::IsMember({"noisy"}));

  auto* oracle = app.add_subcommand("oracle", "n-source Slepian-Wolf power oracle (JSON)");
  add_common(oracle, f);
  add_noisy(oracle, f);
  oracle->add_option("--instance", f.instance, "Instance JSON instead of --n/--c/--seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      ExperimentConfig base;
      base.n_values = {20};
      base.c_values = {1.0};
      const auto config = build_config(f, *gen, base);
      const auto inst = generate_network(config.n_values.front(), config.c_values.front(), config.seed);
      write_output(config.out_path, to_json(inst).dump(2) + "\n");
      return 0;
    }
    if (solve->parsed()) {
      ExperimentConfig base;
      base.n_values = {20};
      base.c_values = {1.0};
      const auto config = build_config(f, *solve, base);
      const auto report = solve_instance(config, load_instance(f, config));
      write_output(config.out_path, to_json(report, config.record_timings).dump(2) + "\n");
      if (!f.emit_dot.empty()) {
        if (const MethodResult* opt = report.find("optimal"); opt != nullptr) {
          write_output(f.emit_dot, witness_to_dot("optimal", opt->witness, report.instance));
        }
      }
      if (!report.all_valid()) {
        std::cerr << "error: an assignment failed its validity check\n";
        return 1;
      }
      return report.exit_code();
    }
    if (sweep->parsed()) {
      ExperimentConfig base;
      base.mode = Mode::noiseless;
      const auto config = build_config(f, *sweep, base);
      write_output(config.out_path, run_sweep(config));
      return 0;
    }
    if (table->parsed()) {
      const auto config = build_config(f, *table, default_table_config());
      const auto cells = compute_table(config);
      write_output(config.out_path, table_csv(cells));
      int code = 0;
      for (const auto& cell : cells) {
        for (const auto& r : cell.reports) code = std::max(code, r.exit_code());
      }
      return code;
    }
    if (oracle->parsed()) {
      ExperimentConfig base;
      base.mode = Mode::noisy;
      base.n_values = {8};
      base.c_values = {1.0};
      const auto config = build_config(f, *oracle, base);
      const auto inst = load_instance(f, config);
      const EntropyOracle entropies(inst);
      const ChannelModel channel(inst.gains, config.peak_power);
      try {
        const auto a = sw_n_power_oracle(entropies, channel, config.clamp_at_zero);
        write_output(config.out_path, to_json(a, inst).dump(2) + "\n");
      } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 2;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
