#include "pwalloc/allocation.hpp"

#include <numeric>

namespace pwalloc {

namespace {

bool within_cap(const ChannelModel& channel, const std::vector<double>& powers) {
  for (double p : powers) {
    if (p > channel.peak_power() + kPowerSlack) return false;
  }
  return true;
}

void fill_powers(PowerAssignment& a, const ChannelModel& channel) {
  a.powers.resize(a.rates.size());
  for (std::size_t i = 0; i < a.rates.size(); ++i) {
    a.powers[i] = channel.power_surrogate(static_cast<int>(i), a.rates[i]);
  }
  a.feasible = within_cap(channel, a.powers);
}

void check_sizes(const EntropyOracle& oracle, const ChannelModel& channel) {
  if (channel.size() != oracle.size()) throw std::invalid_argument("channel/oracle size mismatch");
}

}  // namespace

std::vector<WitnessEdge> witness_edges(const MixedGraph& graph, const SubgraphSelection& selection) {
  std::vector<WitnessEdge> out;
  out.reserve(selection.edges.size());
  for (auto k : selection.edges) {
    const auto& e = graph.edge(k);
    out.push_back({e.tail, e.head, e.weight, e.kind});
  }
  return out;
}

double RateAssignment::sum() const { return std::accumulate(rates.begin(), rates.end(), 0.0); }

double PowerAssignment::sum() const { return std::accumulate(powers.begin(), powers.end(), 0.0); }

double PowerAssignment::sum_rate() const {
  return std::accumulate(rates.begin(), rates.end(), 0.0);
}

std::vector<double> rooted_arborescence_weights(const EntropyOracle& oracle) {
  const MixedGraph total = build_total_digraph(oracle);
  std::vector<double> out;
  for (int i = 0; i < oracle.size(); ++i) {
    const MixedGraph g = rooted_variant(total, i);
    out.push_back(min_weight_arborescence(g, g.star_of(i)).weight);
  }
  return out;
}

RateAssignment optimal_noiseless_rates(const EntropyOracle& oracle) {
  const int n = oracle.size();
  if (n < 2) throw std::invalid_argument("optimal_noiseless_rates: need at least 2 sources");
  const MixedGraph total = build_total_digraph(oracle);
  std::optional<Arborescence> best;
  std::optional<MixedGraph> best_graph;
  for (int i = 0; i < n; ++i) {
    MixedGraph g = rooted_variant(total, i);
    Arborescence a = min_weight_arborescence(g, g.star_of(i));
    if (!best || a.weight < best->weight) {
      best = std::move(a);
      best_graph = std::move(g);
    }
  }

  RateAssignment out;
  out.method = "optimal";
  out.rates.assign(static_cast<std::size_t>(n), 0.0);
  for (auto k : best->selection.edges) {
    const auto& e = best_graph->edge(k);
    out.rates[static_cast<std::size_t>(e.head)] = e.weight;
  }
  out.witness = witness_edges(*best_graph, best->selection);
  return out;
}

RateAssignment matching_rates_noiseless(const EntropyOracle& oracle) {
  const int n = oracle.size();
  if (n < 2) throw std::invalid_argument("matching_rates_noiseless: need at least 2 sources");
  PairCosts costs(n);
  std::vector<double> singles(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    singles[static_cast<std::size_t>(i)] = oracle.marginal(i);
    for (int j = i + 1; j < n; ++j) costs.set(i, j, oracle.joint(i, j));
  }
  const Matching m = min_weight_matching(costs, true, singles);

  RateAssignment out;
  out.method = "matching";
  out.rates.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& [i, j] : m.pairs) {
    out.rates[static_cast<std::size_t>(i)] = oracle.marginal(i);
    out.rates[static_cast<std::size_t>(j)] = oracle.conditional(j, i);
    out.witness.push_back({i, j, oracle.joint(i, j), EdgeKind::undirected});
  }
  for (int s : m.singles) {
    out.rates[static_cast<std::size_t>(s)] = oracle.marginal(s);
    out.witness.push_back({n + s, s, oracle.marginal(s), EdgeKind::directed});
  }
  return out;
}

RateAssignment individual_rates(const EntropyOracle& oracle) {
  RateAssignment out;
  out.method = "individual";
  const int n = oracle.size();
  for (int i = 0; i < n; ++i) {
    out.rates.push_back(oracle.marginal(i));
    out.witness.push_back({n + i, i, oracle.marginal(i), EdgeKind::directed});
  }
  return out;
}

PowerAssignment optimal_noisy_allocation(const EntropyOracle& oracle, const ChannelModel& channel,
                                         const NoisyOptions& options) {
  const int n = oracle.size();
  if (n < 2) throw std::invalid_argument("optimal_noisy_allocation: need at least 2 sources");
  check_sizes(oracle, channel);
  const bool clamp = options.clamp_at_zero;
  const PairOptimizer per_pair = make_pair_optimizer(oracle, channel, clamp);
  const MixedGraph g = build_mixed_total_graph(oracle, channel, per_pair, clamp);

  SmfOptions smf_options;
  smf_options.budget_seconds = options.budget_seconds;
  const SmfSearch search = min_weight_strict_matching_forest(g, smf_options);
  if (!search.forest) {
    if (search.exact) throw InfeasibleError("no strict matching forest fits under P_max");
    throw BudgetExceeded("solver budget exhausted before any strict matching forest was found");
  }

  PowerAssignment out;
  out.method = "optimal";
  out.exact = search.exact;
  out.rates.assign(static_cast<std::size_t>(n), 0.0);
  for (auto k : search.forest->selection.edges) {
    const auto& e = g.edge(k);
    if (e.kind == EdgeKind::undirected) {
      const PairOptimum p = per_pair(e.tail, e.head);
      out.rates[static_cast<std::size_t>(e.tail)] = p.rate_i;
      out.rates[static_cast<std::size_t>(e.head)] = p.rate_j;
    } else if (g.is_starred(e.tail)) {
      out.rates[static_cast<std::size_t>(e.head)] = effective_rate(oracle.marginal(e.head), clamp);
    } else {
      out.rates[static_cast<std::size_t>(e.head)] =
          effective_rate(oracle.conditional(e.head, e.tail), clamp);
    }
  }
  fill_powers(out, channel);
  out.witness = witness_edges(g, search.forest->selection);
  return out;
}

PowerAssignment matching_allocation_noisy(const EntropyOracle& oracle, const ChannelModel& channel,
                                          bool clamp_at_zero) {
  const int n = oracle.size();
  if (n < 2) throw std::invalid_argument("matching_allocation_noisy: need at least 2 sources");
  check_sizes(oracle, channel);
  PairCosts costs(n);
  std::vector<PairOptimum> optima(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  std::vector<double> singles(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double q = channel.power_surrogate(i, effective_rate(oracle.marginal(i), clamp_at_zero));
    singles[static_cast<std::size_t>(i)] = q <= channel.peak_power() + kPowerSlack ? q : kInfinity;
    for (int j = i + 1; j < n; ++j) {
      const PairOptimum p = per_pair_power_optimum(oracle, channel, i, j, clamp_at_zero);
      optima[static_cast<std::size_t>(i * n + j)] = p;
      if (p.feasible) costs.set(i, j, p.sum_power());
    }
  }

  Matching m;
  try {
    m = min_weight_matching(costs, false, singles);
  } catch (const InfeasibleMatching&) {
    throw InfeasibleError("no matching cover fits under P_max");
  }

  PowerAssignment out;
  out.method = "matching";
  out.rates.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& [i, j] : m.pairs) {
    const PairOptimum& p = optima[static_cast<std::size_t>(i * n + j)];
    out.rates[static_cast<std::size_t>(i)] = p.rate_i;
    out.rates[static_cast<std::size_t>(j)] = p.rate_j;
    out.witness.push_back({i, j, p.sum_power(), EdgeKind::undirected});
  }
  for (int s : m.singles) {
    out.rates[static_cast<std::size_t>(s)] = effective_rate(oracle.marginal(s), clamp_at_zero);
    out.witness.push_back({n + s, s, singles[static_cast<std::size_t>(s)], EdgeKind::directed});
  }
  fill_powers(out, channel);
  return out;
}

PowerAssignment individual_powers(const EntropyOracle& oracle, const ChannelModel& channel,
                                  bool clamp_at_zero) {
  check_sizes(oracle, channel);
  PowerAssignment out;
  out.method = "individual";
  const int n = oracle.size();
  for (int i = 0; i < n; ++i) {
    out.rates.push_back(effective_rate(oracle.marginal(i), clamp_at_zero));
  }
  fill_powers(out, channel);
  for (int i = 0; i < n; ++i) {
    out.witness.push_back({n + i, i, out.powers[static_cast<std::size_t>(i)], EdgeKind::directed});
  }
  return out;
}

}  // namespace pwalloc
