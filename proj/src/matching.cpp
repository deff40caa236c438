#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/maximum_weighted_matching.hpp>

#include "pwalloc/solvers.hpp"

namespace pwalloc {

PairCosts::PairCosts(int n)
    : n_(n), w_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), kInfinity) {
  if (n < 0) throw std::invalid_argument("PairCosts: negative size");
}

void PairCosts::set(int i, int j, double w) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i == j) {
    throw std::invalid_argument("PairCosts::set: bad pair");
  }
  w_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)] = w;
  w_[static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)] = w;
}

bool PairCosts::has(int i, int j) const { return i != j && std::isfinite((*this)(i, j)); }

namespace {

std::vector<double> singleton_vector(int n, std::span<const double> singleton_costs,
                                     bool require_perfect) {
  if (!singleton_costs.empty() && static_cast<int>(singleton_costs.size()) != n) {
    throw std::invalid_argument("singleton cost vector has the wrong length");
  }
  if (singleton_costs.empty()) {
    // Perfect covers of odd n need an explicit charge from the caller.
    return std::vector<double>(static_cast<std::size_t>(n),
                               require_perfect ? kInfinity : 0.0);
  }
  return {singleton_costs.begin(), singleton_costs.end()};
}

Matching finish(const PairCosts& costs, const std::vector<double>& single,
                std::vector<std::pair<int, int>> pairs, std::vector<int> singles) {
  std::sort(pairs.begin(), pairs.end());
  std::sort(singles.begin(), singles.end());
  Matching m;
  m.pairs = std::move(pairs);
  m.singles = std::move(singles);
  for (const auto& [a, b] : m.pairs) m.weight += costs(a, b);
  for (int s : m.singles) m.weight += single[static_cast<std::size_t>(s)];
  return m;
}

Matching solve_dp(const PairCosts& costs, const std::vector<double>& single, bool require_perfect) {
  const int n = costs.size();
  const std::size_t states = std::size_t{1} << n;
  const std::uint32_t full = static_cast<std::uint32_t>(states - 1);
  const int layers = require_perfect ? (n % 2) + 1 : 1;

  std::vector<double> best(states * static_cast<std::size_t>(layers), kInfinity);
  // Move that produced each state: the covered node and its partner (-1 = single).
  std::vector<std::int8_t> covered(best.size(), -1);
  std::vector<std::int8_t> partner(best.size(), -1);
  auto at = [states](std::uint32_t mask, int layer) {
    return static_cast<std::size_t>(layer) * states + mask;
  };
  auto relax = [&](std::size_t to, double cand, int i, int j) {
    if (cand < best[to]) {
      best[to] = cand;
      covered[to] = static_cast<std::int8_t>(i);
      partner[to] = static_cast<std::int8_t>(j);
    }
  };
  best[at(0, 0)] = 0.0;

  for (std::uint32_t mask = 0; mask < full; ++mask) {
    for (int layer = 0; layer < layers; ++layer) {
      const double here = best[at(mask, layer)];
      if (!std::isfinite(here)) continue;
      const int i = std::countr_one(mask);
      const std::uint32_t with_i = mask | (1U << i);
      const bool single_allowed = !require_perfect || layer + 1 < layers;
      if (single_allowed && std::isfinite(single[static_cast<std::size_t>(i)])) {
        relax(at(with_i, require_perfect ? layer + 1 : layer),
              here + single[static_cast<std::size_t>(i)], i, -1);
      }
      for (int j = i + 1; j < n; ++j) {
        if (((mask >> j) & 1U) || !costs.has(i, j)) continue;
        relax(at(with_i | (1U << j), layer), here + costs(i, j), i, j);
      }
    }
  }

  int layer = layers - 1;
  if (!std::isfinite(best[at(full, layer)])) {
    throw InfeasibleMatching("no admissible matching covers every node");
  }

  std::vector<std::pair<int, int>> pairs;
  std::vector<int> singles;
  std::uint32_t mask = full;
  while (mask != 0) {
    const int i = covered[at(mask, layer)];
    const int j = partner[at(mask, layer)];
    mask &= ~(1U << i);
    if (j < 0) {
      singles.push_back(i);
      if (require_perfect) --layer;
    } else {
      pairs.emplace_back(i, j);
      mask &= ~(1U << j);
    }
  }
  return finish(costs, single, std::move(pairs), std::move(singles));
}

Matching solve_blossom(const PairCosts& costs, const std::vector<double>& single,
                       bool require_perfect) {
  using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS,
                                      boost::no_property,
                                      boost::property<boost::edge_weight_t, long long>>;
  const int n = costs.size();
  struct Candidate {
    int a;
    int b;
    double w;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (costs.has(i, j)) candidates.push_back({i, j, costs(i, j)});
    }
  }
  int total_nodes = n;
  if (require_perfect) {
    if (n % 2 == 1) {
      const int dummy = total_nodes++;
      for (int i = 0; i < n; ++i) {
        if (std::isfinite(single[static_cast<std::size_t>(i)])) {
          candidates.push_back({i, dummy, single[static_cast<std::size_t>(i)]});
        }
      }
    }
  } else {
    total_nodes = 2 * n;
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(single[static_cast<std::size_t>(i)])) {
        candidates.push_back({i, n + i, single[static_cast<std::size_t>(i)]});
      }
      for (int j = i + 1; j < n; ++j) candidates.push_back({n + i, n + j, 0.0});
    }
  }

  // Integer weights keep the primal-dual updates exact. Offsetting by more
  // than the total spread makes every maximum matching maximum-cardinality.
  double spread = 0.0;
  for (const auto& c : candidates) spread += std::abs(c.w);
  const double scale = spread > 0.0 ? std::min(1e9, 1e15 / spread) : 1.0;
  long long offset = 1;
  std::vector<long long> scaled;
  scaled.reserve(candidates.size());
  for (const auto& c : candidates) {
    scaled.push_back(std::llround(c.w * scale));
    offset += std::llabs(scaled.back());
  }

  Graph g(static_cast<std::size_t>(total_nodes));
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    boost::add_edge(static_cast<std::size_t>(candidates[k].a),
                    static_cast<std::size_t>(candidates[k].b), offset - scaled[k], g);
  }
  std::vector<boost::graph_traits<Graph>::vertex_descriptor> mate(
      static_cast<std::size_t>(total_nodes));
  boost::maximum_weighted_matching(g, &mate[0]);

  const auto none = boost::graph_traits<Graph>::null_vertex();
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> singles;
  for (int i = 0; i < n; ++i) {
    const auto m = mate[static_cast<std::size_t>(i)];
    if (m == none) throw InfeasibleMatching("no admissible matching covers every node");
    const int j = static_cast<int>(m);
    if (j >= n) {
      singles.push_back(i);
    } else if (i < j) {
      pairs.emplace_back(i, j);
    }
  }
  return finish(costs, single, std::move(pairs), std::move(singles));
}

}  // namespace

Matching min_weight_matching(const PairCosts& costs, bool require_perfect,
                             std::span<const double> singleton_costs) {
  const int n = costs.size();
  const auto single = singleton_vector(n, singleton_costs, require_perfect);
  if (n == 0) return Matching{};
  if (n <= kMatchingDpMaxNodes) return solve_dp(costs, single, require_perfect);
  return solve_blossom(costs, single, require_perfect);
}

}  // namespace pwalloc
