#include "pwalloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace pwalloc {

namespace {

// Runs body(0..count-1) on up to `threads` workers; results are written by
// index, so the outcome does not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, int threads, Body body) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

const char* status_name(MethodStatus s) {
  switch (s) {
    case MethodStatus::ok:
      return "ok";
    case MethodStatus::infeasible:
      return "infeasible";
    case MethodStatus::budget_exceeded:
      return "budget_exceeded";
    case MethodStatus::unavailable:
      return "unavailable";
  }
  return "?";
}

MethodResult from_rates(const RateAssignment& a, const EntropyOracle& oracle) {
  MethodResult r;
  r.method = a.method;
  r.rates = a.rates;
  r.witness = a.witness;
  r.sum = a.sum();
  r.sum_rate = a.sum();
  const ValidityReport v = check_pairwise_valid(a.rates, oracle);
  r.valid = v.valid;
  r.schedule = v.schedule;
  r.schedule_ok = v.valid && simulate_decode(v.schedule, a.rates, oracle);
  return r;
}

MethodResult from_powers(const PowerAssignment& a, const EntropyOracle& oracle,
                         const ChannelModel& channel, bool clamp) {
  MethodResult r;
  r.method = a.method;
  r.rates = a.rates;
  r.powers = a.powers;
  r.witness = a.witness;
  r.sum = a.sum();
  r.sum_rate = a.sum_rate();
  r.exact = a.exact;
  r.feasible = a.feasible;
  if (!a.feasible) r.status = MethodStatus::infeasible;
  const ValidityReport v = check_generalized_valid(a.rates, oracle, channel, clamp);
  r.valid = v.valid;
  r.schedule = v.schedule;
  r.schedule_ok = v.valid && simulate_decode(v.schedule, a.rates, oracle);
  return r;
}

// Full Slepian-Wolf region membership plus the caps; the oracle's own check.
bool in_full_sw_region(const std::vector<double>& rates, const EntropyOracle& oracle,
                       const ChannelModel& channel) {
  const int n = oracle.size();
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t s = 1; s <= full; ++s) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if ((s >> i) & 1U) sum += rates[static_cast<std::size_t>(i)];
    }
    const double bound = oracle.subset_conditional(s);
    if (sum < bound - 1e-9 * std::max(1.0, std::abs(bound))) return false;
  }
  for (int i = 0; i < n; ++i) {
    if (channel.power_surrogate(i, rates[static_cast<std::size_t>(i)]) >
        channel.peak_power() + kPowerSlack) {
      return false;
    }
  }
  return true;
}

MethodResult failed(const std::string& method, MethodStatus status, const std::string& note) {
  MethodResult r;
  r.method = method;
  r.status = status;
  r.exact = status != MethodStatus::budget_exceeded;
  r.feasible = status != MethodStatus::infeasible;
  r.note = note;
  r.sum = std::nan("");
  r.sum_rate = std::nan("");
  return r;
}

std::string mode_name(Mode m) { return m == Mode::noiseless ? "noiseless" : "noisy"; }

}  // namespace

ExperimentConfig default_table_config() {
  ExperimentConfig c;
  c.mode = Mode::noisy;
  c.n_values = {4, 8, 12};
  c.c_values = {1.0, 3.0, 5.0};
  c.replications = 3;
  return c;
}

void validate(const ExperimentConfig& config) {
  if (config.n_values.empty() || config.c_values.empty()) {
    throw std::invalid_argument("config needs nonempty n and c lists");
  }
  for (int n : config.n_values) {
    if (n < 2) throw std::invalid_argument("every n must be at least 2");
  }
  for (double c : config.c_values) {
    if (!(c > 0.0)) throw std::invalid_argument("every c must be positive");
  }
  if (config.replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (!(config.peak_power > 0.0)) throw std::invalid_argument("pmax must be positive");
  if (!(config.budget_seconds > 0.0)) throw std::invalid_argument("budget must be positive");
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig base) {
  try {
    if (j.contains("mode")) {
      const auto m = j.at("mode").get<std::string>();
      if (m == "noiseless") {
        base.mode = Mode::noiseless;
      } else if (m == "noisy") {
        base.mode = Mode::noisy;
      } else {
        throw std::invalid_argument("mode must be noiseless or noisy");
      }
    }
    auto list = [&j](const char* key, auto& target) {
      if (!j.contains(key)) return;
      using T = typename std::decay_t<decltype(target)>::value_type;
      const auto& v = j.at(key);
      target = v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
    };
    list("n", base.n_values);
    list("c", base.c_values);
    if (j.contains("pmax")) {
      base.peak_power = j.at("pmax").is_null() ? kInfinity : j.at("pmax").get<double>();
    }
    base.seed = j.value("seed", base.seed);
    base.replications = j.value("reps", base.replications);
    base.clamp_at_zero = j.value("clamp", base.clamp_at_zero);
    base.out_path = j.value("out", base.out_path);
    if (j.contains("budget_secs")) base.budget_seconds = j.at("budget_secs").get<double>();
    base.threads = j.value("threads", base.threads);
    return base;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed config JSON: ") + e.what());
  }
}

const MethodResult* SolveReport::find(const std::string& method) const {
  for (const auto& m : methods) {
    if (m.method == method) return &m;
  }
  return nullptr;
}

int SolveReport::exit_code() const {
  const MethodResult* opt = find("optimal");
  if (opt == nullptr) return 0;
  if (opt->status == MethodStatus::infeasible) return 2;
  if (opt->status == MethodStatus::budget_exceeded || !opt->exact) return 3;
  return 0;
}

bool SolveReport::all_valid() const {
  for (const auto& m : methods) {
    if (m.status != MethodStatus::ok) continue;
    if (!m.valid || !m.schedule_ok) return false;
  }
  return true;
}

SolveReport solve_instance(const ExperimentConfig& config, const NetworkInstance& instance) {
  validate(instance);
  SolveReport report;
  report.instance = instance;
  report.mode = config.mode;
  const EntropyOracle oracle(instance);
  report.h1 = oracle.marginal(0);
  report.joint_entropy = oracle.joint_all();

  if (config.mode == Mode::noiseless) {
    report.peak_power = kInfinity;
    for (auto method : {&optimal_noiseless_rates, &matching_rates_noiseless, &individual_rates}) {
      Stopwatch clock;
      const RateAssignment a = method(oracle);
      MethodResult r = from_rates(a, oracle);
      r.seconds = clock.seconds();
      report.methods.push_back(std::move(r));
    }
    return report;
  }

  report.peak_power = config.peak_power;
  const ChannelModel channel(instance.gains, config.peak_power);
  const bool clamp = config.clamp_at_zero;
  {
    Stopwatch clock;
    NoisyOptions options;
    options.clamp_at_zero = clamp;
    options.budget_seconds = config.budget_seconds;
    try {
      MethodResult r = from_powers(optimal_noisy_allocation(oracle, channel, options), oracle,
                                   channel, clamp);
      if (!r.exact) r.note = "budget exhausted; best forest found so far";
      r.seconds = clock.seconds();
      report.methods.push_back(std::move(r));
    } catch (const InfeasibleError& e) {
      report.methods.push_back(failed("optimal", MethodStatus::infeasible, e.what()));
    } catch (const BudgetExceeded& e) {
      report.methods.push_back(failed("optimal", MethodStatus::budget_exceeded, e.what()));
    }
  }
  {
    Stopwatch clock;
    try {
      MethodResult r =
          from_powers(matching_allocation_noisy(oracle, channel, clamp), oracle, channel, clamp);
      r.seconds = clock.seconds();
      report.methods.push_back(std::move(r));
    } catch (const InfeasibleError& e) {
      report.methods.push_back(failed("matching", MethodStatus::infeasible, e.what()));
    }
  }
  {
    Stopwatch clock;
    MethodResult r = from_powers(individual_powers(oracle, channel, clamp), oracle, channel, clamp);
    r.seconds = clock.seconds();
    report.methods.push_back(std::move(r));
  }
  if (instance.size() <= kSwOracleMaxNodes) {
    Stopwatch clock;
    try {
      const PowerAssignment a = sw_n_power_oracle(oracle, channel, clamp);
      MethodResult r;
      r.method = a.method;
      r.rates = a.rates;
      r.powers = a.powers;
      r.sum = a.sum();
      r.sum_rate = a.sum_rate();
      r.feasible = a.feasible;
      r.valid = in_full_sw_region(a.rates, oracle, channel);
      r.schedule_ok = r.valid;
      r.note = "full Slepian-Wolf region; no pairwise schedule";
      r.seconds = clock.seconds();
      report.methods.push_back(std::move(r));
    } catch (const InfeasibleError& e) {
      report.methods.push_back(failed("sw_oracle", MethodStatus::infeasible, e.what()));
    }
  } else {
    report.methods.push_back(failed("sw_oracle", MethodStatus::unavailable,
                                    "more than " + std::to_string(kSwOracleMaxNodes) + " sources"));
  }
  return report;
}

Json to_json(const SolveReport& report, bool with_timings) {
  Json methods = Json::array();
  for (const auto& m : report.methods) {
    Json j{{"method", m.method},
           {"status", status_name(m.status)},
           {"exact", m.exact},
           {"feasible", m.feasible},
           {"valid", m.valid},
           {"schedule_ok", m.schedule_ok}};
    if (m.status != MethodStatus::ok && m.rates.empty()) {
      j["note"] = m.note;
      methods.push_back(j);
      continue;
    }
    j["rates"] = m.rates;
    if (report.mode == Mode::noisy) j["powers"] = m.powers;
    j["witness_edges"] = witness_to_json(m.witness, report.instance);
    j["sum"] = m.sum;
    if (report.mode == Mode::noiseless) {
      j["r_s0"] = m.sum / report.h1;
    } else {
      j["sum_rate"] = m.sum_rate;
    }
    j["schedule"] = to_json(m.schedule);
    if (!m.note.empty()) j["note"] = m.note;
    if (with_timings) j["seconds"] = m.seconds;
    methods.push_back(j);
  }
  Json out{{"mode", mode_name(report.mode)},
           {"instance", to_json(report.instance)},
           {"h1", report.h1},
           {"joint_entropy", report.joint_entropy},
           {"methods", methods}};
  if (report.mode == Mode::noiseless) {
    out["joint_entropy_r_s0"] = report.joint_entropy / report.h1;
  } else {
    out["pmax"] = std::isinf(report.peak_power) ? Json(nullptr) : Json(report.peak_power);
  }
  return out;
}

std::uint64_t replication_seed(const ExperimentConfig& config, int rep) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(rep));
}

std::string run_sweep(const ExperimentConfig& config) {
  validate(config);
  if (config.mode != Mode::noiseless) throw std::invalid_argument("sweep runs in noiseless mode");
  struct Task {
    int n;
    double c;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (int n : config.n_values) {
    for (double c : config.c_values) {
      for (int rep = 0; rep < config.replications; ++rep) {
        tasks.push_back({n, c, replication_seed(config, rep)});
      }
    }
  }
  std::vector<SolveReport> reports(tasks.size());
  parallel_for(tasks.size(), config.threads, [&](std::size_t k) {
    const auto& t = tasks[k];
    reports[k] = solve_instance(config, generate_network(t.n, t.c, t.seed));
    if (!reports[k].all_valid()) throw std::logic_error("an assignment failed its validity check");
  });

  std::ostringstream os;
  os << "n,c,seed,method,r_s0\n";
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const auto& t = tasks[k];
    const auto& r = reports[k];
    auto row = [&](const std::string& method, double value) {
      os << t.n << ',' << format_number(t.c) << ',' << t.seed << ',' << method << ','
         << format_number(value / r.h1) << '\n';
    };
    for (const auto& m : r.methods) row(m.method, m.sum);
    row("joint_entropy", r.joint_entropy);
  }
  return os.str();
}

std::vector<TableCell> compute_table(const ExperimentConfig& config) {
  validate(config);
  if (config.mode != Mode::noisy) throw std::invalid_argument("table runs in noisy mode");
  std::vector<TableCell> cells;
  for (double c : config.c_values) {
    for (int n : config.n_values) {
      TableCell cell;
      cell.c = c;
      cell.n = n;
      for (int rep = 0; rep < config.replications; ++rep) {
        cell.seeds.push_back(replication_seed(config, rep));
      }
      cell.reports.resize(cell.seeds.size());
      cells.push_back(std::move(cell));
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t a = 0; a < cells.size(); ++a) {
    for (std::size_t b = 0; b < cells[a].seeds.size(); ++b) tasks.emplace_back(a, b);
  }
  parallel_for(tasks.size(), config.threads, [&](std::size_t k) {
    auto& cell = cells[tasks[k].first];
    const std::size_t b = tasks[k].second;
    cell.reports[b] = solve_instance(config, generate_network(cell.n, cell.c, cell.seeds[b]));
    if (!cell.reports[b].all_valid()) {
      throw std::logic_error("an assignment failed its validity check");
    }
  });

  for (auto& cell : cells) {
    double smf = 0.0, matching = 0.0, optimal = 0.0;
    int used = 0;
    bool oracle_available = true;
    for (const auto& r : cell.reports) {
      const MethodResult* s = r.find("optimal");
      const MethodResult* m = r.find("matching");
      const MethodResult* o = r.find("sw_oracle");
      if (o->status == MethodStatus::unavailable) oracle_available = false;
      const bool ok = s->status == MethodStatus::ok && s->exact &&
                      m->status == MethodStatus::ok &&
                      (o->status == MethodStatus::ok || o->status == MethodStatus::unavailable);
      if (!ok) {
        ++cell.excluded;
        continue;
      }
      ++used;
      smf += s->sum;
      matching += m->sum;
      if (o->status == MethodStatus::ok) optimal += o->sum;
    }
    const double nan = std::nan("");
    cell.mean_smf = used > 0 ? smf / used : nan;
    cell.mean_matching = used > 0 ? matching / used : nan;
    cell.mean_optimal = used > 0 && oracle_available ? optimal / used : nan;
  }
  return cells;
}

std::string table_csv(const std::vector<TableCell>& cells) {
  auto cell_value = [](const MethodResult* m) -> std::string {
    if (m == nullptr || m->status != MethodStatus::ok) return "";
    return format_number(m->sum);
  };
  auto mean_value = [](double v) -> std::string { return std::isnan(v) ? "" : format_number(v); };

  std::ostringstream os;
  os << "c,n,seed,status,smf,matching,optimal\n";
  for (const auto& cell : cells) {
    for (std::size_t b = 0; b < cell.reports.size(); ++b) {
      const auto& r = cell.reports[b];
      const MethodResult* s = r.find("optimal");
      std::string status = "ok";
      for (const auto& m : r.methods) {
        if (m.status == MethodStatus::infeasible && m.method != "individual") status = "infeasible";
      }
      if (s->status == MethodStatus::budget_exceeded || !s->exact) status = "budget_exceeded";
      os << format_number(cell.c) << ',' << cell.n << ',' << cell.seeds[b] << ',' << status << ','
         << cell_value(s) << ',' << cell_value(r.find("matching")) << ','
         << cell_value(r.find("sw_oracle")) << '\n';
    }
    os << format_number(cell.c) << ',' << cell.n << ",mean,excluded=" << cell.excluded << ','
       << mean_value(cell.mean_smf) << ',' << mean_value(cell.mean_matching) << ','
       << mean_value(cell.mean_optimal) << '\n';
  }
  return os.str();
}

std::string run_table(const ExperimentConfig& config) { return table_csv(compute_table(config)); }

}  // namespace pwalloc
