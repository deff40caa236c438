// Experiment runner: single-instance reports, normalized sum-rate sweeps and
// the noisy sum-power comparison table.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwalloc/serialize.hpp"

namespace pwalloc {

enum class Mode { noiseless, noisy };

struct ExperimentConfig {
  Mode mode = Mode::noiseless;
  std::vector<int> n_values{4, 8, 12, 16, 20, 24, 28, 32, 36, 40};
  std::vector<double> c_values{1.0, 5.0};
  double peak_power = 10.0;
  std::uint64_t seed = 1;
  int replications = 1;
  bool clamp_at_zero = true;  ///< noisy pipeline only; noiseless rates stay raw
  std::string out_path;
  double budget_seconds = kInfinity;
  int threads = 1;
  bool record_timings = false;  ///< wall-clock fields make reports run-dependent
};

/// Table defaults: c in {1, 3, 5}, n in {4, 8, 12}, three replications.
ExperimentConfig default_table_config();

/// Throws std::invalid_argument on empty lists, bad sizes or replications < 1.
void validate(const ExperimentConfig& config);

/// Reads the JSON config keys mode, n, c, pmax, seed, reps, clamp, out,
/// budget_secs, threads. Missing keys keep the values of `base`.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base);

enum class MethodStatus { ok, infeasible, budget_exceeded, unavailable };

struct MethodResult {
  std::string method;
  MethodStatus status = MethodStatus::ok;
  bool exact = true;
  bool feasible = true;
  bool valid = false;        ///< passes its validity checker
  bool schedule_ok = false;  ///< extracted schedule replays under simulate_decode
  double sum = 0.0;          ///< sum rate (noiseless) or sum power (noisy)
  double sum_rate = 0.0;
  std::vector<double> rates;
  std::vector<double> powers;
  std::vector<WitnessEdge> witness;
  DecodeSchedule schedule;
  double seconds = 0.0;
  std::string note;
};

struct SolveReport {
  NetworkInstance instance;
  Mode mode = Mode::noiseless;
  double peak_power = kInfinity;
  double h1 = 0.0;             ///< marginal entropy of node 0
  double joint_entropy = 0.0;  ///< H(X_1, ..., X_n)
  std::vector<MethodResult> methods;

  const MethodResult* find(const std::string& method) const;
  /// 0 success, 2 optimal method infeasible, 3 budget exhausted.
  int exit_code() const;
  /// Every produced assignment passed validity and schedule replay.
  bool all_valid() const;
};

/// Runs every applicable method. Noiseless: optimal, matching, individual.
/// Noisy: optimal, matching, individual and, for n <= 12, sw_oracle.
SolveReport solve_instance(const ExperimentConfig& config, const NetworkInstance& instance);

Json to_json(const SolveReport& report, bool with_timings = false);

/// Rows (n, c, seed, method, r_s0) for methods optimal, matching, individual
/// and joint_entropy, ordered by n, then c, then replication.
std::string run_sweep(const ExperimentConfig& config);

struct TableCell {
  double c = 0.0;
  int n = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<SolveReport> reports;
  int excluded = 0;
  double mean_smf = 0.0;
  double mean_matching = 0.0;
  double mean_optimal = 0.0;  ///< NaN when the oracle is unavailable
};

/// Per-cell replications and means; replications where any method is
/// infeasible or inexact are excluded from the means and counted.
std::vector<TableCell> compute_table(const ExperimentConfig& config);

/// Long-format CSV: one row per replication and one mean row per cell,
/// columns (c, n, seed, status, smf, matching, optimal).
std::string run_table(const ExperimentConfig& config);
std::string table_csv(const std::vector<TableCell>& cells);

/// Seed of replication `rep`; shared across n and c so cells are paired.
std::uint64_t replication_seed(const ExperimentConfig& config, int rep);

}  // namespace pwalloc
