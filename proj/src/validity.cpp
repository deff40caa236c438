#include "pwalloc/validity.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace pwalloc {

namespace {

// Breadth-first expansion along directed regular edges from every decoded
// node. Out-neighbours are visited in increasing index order.
void expand(const MixedGraph& g, std::vector<char>& decoded, DecodeSchedule& schedule) {
  const int n = g.regular_count();
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (const auto& e : g.edges()) {
    if (e.kind == EdgeKind::directed && !g.is_starred(e.tail)) {
      out[static_cast<std::size_t>(e.tail)].push_back(e.head);
    }
  }
  for (auto& list : out) std::sort(list.begin(), list.end());

  std::deque<int> queue;
  for (const auto& step : schedule) {
    queue.push_back(step.node);
    if (step.kind == StepKind::joint) queue.push_back(step.other);
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : out[static_cast<std::size_t>(v)]) {
      if (decoded[static_cast<std::size_t>(w)]) continue;
      decoded[static_cast<std::size_t>(w)] = 1;
      schedule.push_back({StepKind::conditional, w, v});
      queue.push_back(w);
    }
  }
}

ValidityReport finish(std::vector<char> failing, DecodeSchedule schedule) {
  ValidityReport r;
  const auto it = std::find(failing.begin(), failing.end(), 1);
  r.valid = it == failing.end();
  if (!r.valid) r.counterexample = static_cast<int>(it - failing.begin());
  r.schedule = std::move(schedule);
  return r;
}

}  // namespace

ValidityReport check_pairwise_valid(std::span<const double> rates, const EntropyOracle& oracle) {
  const TestGraph t = build_test_graph(rates, oracle);
  const int n = oracle.size();
  std::vector<char> decoded(static_cast<std::size_t>(n), 0);
  DecodeSchedule schedule;
  for (int star : t.parent_set) {
    const int i = t.graph.regular_of(star);
    decoded[static_cast<std::size_t>(i)] = 1;
    schedule.push_back({StepKind::solo, i, -1});
  }
  expand(t.graph, decoded, schedule);

  std::vector<char> failing(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    failing[static_cast<std::size_t>(i)] = !t.graph.contains(i) || !decoded[static_cast<std::size_t>(i)];
  }
  return finish(std::move(failing), std::move(schedule));
}

ValidityReport check_generalized_valid(std::span<const double> rates, const EntropyOracle& oracle,
                                       const ChannelModel& channel, bool clamp_at_zero) {
  const PairOptimizer per_pair = make_pair_optimizer(oracle, channel, clamp_at_zero);
  const MixedGraph g = build_mixed_test_graph(rates, oracle, channel, per_pair, clamp_at_zero);
  const int n = oracle.size();
  std::vector<char> decoded(static_cast<std::size_t>(n), 0);
  DecodeSchedule schedule;

  for (int i = 0; i < n; ++i) {
    if (g.contains(g.star_of(i))) {
      decoded[static_cast<std::size_t>(i)] = 1;
      schedule.push_back({StepKind::solo, i, -1});
    }
  }
  for (int i = 0; i < n; ++i) {
    if (decoded[static_cast<std::size_t>(i)]) continue;
    for (int j = 0; j < n; ++j) {
      if (j == i || decoded[static_cast<std::size_t>(j)] || !g.find_undirected(i, j)) continue;
      decoded[static_cast<std::size_t>(i)] = 1;
      decoded[static_cast<std::size_t>(j)] = 1;
      schedule.push_back({StepKind::joint, i, j});
      break;
    }
  }
  expand(g, decoded, schedule);

  std::vector<char> failing(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const double p = channel.power_surrogate(i, effective_rate(rates[static_cast<std::size_t>(i)],
                                                               clamp_at_zero));
    failing[static_cast<std::size_t>(i)] = !g.contains(i) || !decoded[static_cast<std::size_t>(i)] ||
                                           p > channel.peak_power() + kPowerSlack;
  }
  return finish(std::move(failing), std::move(schedule));
}

bool simulate_decode(const DecodeSchedule& schedule, std::span<const double> rates,
                     const EntropyOracle& oracle) {
  const int n = oracle.size();
  if (static_cast<int>(rates.size()) != n) throw std::invalid_argument("rate vector has the wrong length");
  auto check_node = [n](int v) {
    if (v < 0 || v >= n) throw std::invalid_argument("schedule names an unknown node");
  };
  std::vector<char> decoded(static_cast<std::size_t>(n), 0);
  auto mark = [&decoded](int v) {
    if (decoded[static_cast<std::size_t>(v)]) throw std::invalid_argument("node decoded twice");
    decoded[static_cast<std::size_t>(v)] = 1;
  };
  auto r = [&rates](int v) { return rates[static_cast<std::size_t>(v)]; };

  bool ok = true;
  for (const auto& step : schedule) {
    check_node(step.node);
    switch (step.kind) {
      case StepKind::solo:
        ok = ok && r(step.node) >= oracle.marginal(step.node) - kRateSlack;
        mark(step.node);
        break;
      case StepKind::joint:
        check_node(step.other);
        if (step.other == step.node) throw std::invalid_argument("joint step needs two nodes");
        ok = ok && in_sw_region(oracle.pair(step.node, step.other), r(step.node), r(step.other));
        mark(step.node);
        mark(step.other);
        break;
      case StepKind::conditional:
        check_node(step.other);
        if (!decoded[static_cast<std::size_t>(step.other)]) {
          throw std::invalid_argument("conditional step precedes its side information");
        }
        ok = ok && r(step.node) >= oracle.conditional(step.node, step.other) - kRateSlack;
        mark(step.node);
        break;
    }
  }
  return ok && std::all_of(decoded.begin(), decoded.end(), [](char d) { return d != 0; });
}

}  // namespace pwalloc
