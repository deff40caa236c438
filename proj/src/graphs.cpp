#include "pwalloc/graphs.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pwalloc {

namespace {


class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[static_cast<std::size_t>(b)] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

void check_rates(std::span<const double> rates, const EntropyOracle& oracle) {
  if (static_cast<int>(rates.size()) != oracle.size()) {
    throw std::invalid_argument("rate vector length must equal the number of sources");
  }
}

}  // namespace

MixedGraph::MixedGraph(int regular_count) : n_(regular_count) {
  if (regular_count < 0) throw std::invalid_argument("negative node count");
  const auto nodes = static_cast<std::size_t>(2 * n_);
  present_.assign(nodes, 1);
  directed_index_.assign(nodes * nodes, -1);
  undirected_index_.assign(nodes * nodes, -1);
}

void MixedGraph::check_present(int node) const {
  if (!contains(node)) throw std::invalid_argument("unknown node " + std::to_string(node));
}

bool MixedGraph::contains(int node) const {
  return node >= 0 && node < node_count() && present_[static_cast<std::size_t>(node)] != 0;
}

std::size_t MixedGraph::add_directed(int tail, int head, double weight) {
  check_present(tail);
  check_present(head);
  if (is_starred(head)) throw std::invalid_argument("starred nodes cannot be heads");
  if (tail == head) throw std::invalid_argument("self loops are not allowed");
  if (is_starred(tail) && regular_of(tail) != head) {
    throw std::invalid_argument("starred node i* may only point at i");
  }
  auto& idx = directed_index_[slot(tail, head)];
  if (idx >= 0) throw std::invalid_argument("duplicate directed edge");
  idx = static_cast<int>(edges_.size());
  edges_.push_back(Edge{tail, head, weight, EdgeKind::directed});
  return edges_.size() - 1;
}

std::size_t MixedGraph::add_undirected(int u, int v, double weight) {
  check_present(u);
  check_present(v);
  if (is_starred(u) || is_starred(v)) {
    throw std::invalid_argument("starred nodes cannot join undirected edges");
  }
  if (u == v) throw std::invalid_argument("self loops are not allowed");
  if (u > v) std::swap(u, v);
  if (undirected_index_[slot(u, v)] >= 0) throw std::invalid_argument("duplicate undirected edge");
  const int idx = static_cast<int>(edges_.size());
  undirected_index_[slot(u, v)] = idx;
  undirected_index_[slot(v, u)] = idx;
  edges_.push_back(Edge{u, v, weight, EdgeKind::undirected});
  return edges_.size() - 1;
}

std::optional<std::size_t> MixedGraph::find_directed(int tail, int head) const {
  if (tail < 0 || head < 0 || tail >= node_count() || head >= node_count()) return std::nullopt;
  const int idx = directed_index_[slot(tail, head)];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

std::optional<std::size_t> MixedGraph::find_undirected(int u, int v) const {
  if (u < 0 || v < 0 || u >= node_count() || v >= node_count()) return std::nullopt;
  const int idx = undirected_index_[slot(u, v)];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

bool MixedGraph::is_digraph() const {
  for (const auto& e : edges_) {
    if (e.kind == EdgeKind::undirected) return false;
  }
  return true;
}

std::vector<int> MixedGraph::present_regular_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

void MixedGraph::remove_isolated_nodes() {
  std::vector<char> touched(present_.size(), 0);
  for (const auto& e : edges_) {
    touched[static_cast<std::size_t>(e.tail)] = 1;
    touched[static_cast<std::size_t>(e.head)] = 1;
  }
  for (std::size_t v = 0; v < present_.size(); ++v) {
    if (!touched[v]) present_[v] = 0;
  }
}

void MixedGraph::remove_node(int node) {
  check_present(node);
  for (const auto& e : edges_) {
    if (e.tail == node || e.head == node) {
      throw std::invalid_argument("cannot remove a node with incident edges");
    }
  }
  present_[static_cast<std::size_t>(node)] = 0;
}

double total_weight(const MixedGraph& graph, const SubgraphSelection& selection) {
  double acc = 0.0;
  for (auto idx : selection.edges) acc += graph.edge(idx).weight;
  return acc;
}

SubgraphSelection all_edges(const MixedGraph& graph) {
  SubgraphSelection sel;
  sel.edges.resize(graph.edge_count());
  std::iota(sel.edges.begin(), sel.edges.end(), std::size_t{0});
  return sel;
}

void check_selection(const MixedGraph& graph, const SubgraphSelection& selection) {
  for (auto idx : selection.edges) {
    if (idx >= graph.edge_count()) throw std::invalid_argument("selection edge out of range");
  }
}

int head_count(const MixedGraph& graph, int node) {
  return head_count(graph, all_edges(graph), node);
}

int head_count(const MixedGraph& graph, const SubgraphSelection& selection, int node) {
  if (!graph.contains(node)) throw std::invalid_argument("unknown node " + std::to_string(node));
  check_selection(graph, selection);
  int count = 0;
  for (auto idx : selection.edges) {
    const auto& e = graph.edge(idx);
    if (e.head == node) ++count;
    if (e.kind == EdgeKind::undirected && e.tail == node) ++count;
  }
  return count;
}

bool UndirectedMultigraph::has_cycle() const {
  DisjointSets sets(node_count);
  for (const auto& [a, b] : edges) {
    if (!sets.unite(a, b)) return true;
  }
  return false;
}

UndirectedMultigraph underlying_undirected(const MixedGraph& graph) {
  return underlying_undirected(graph, all_edges(graph));
}

UndirectedMultigraph underlying_undirected(const MixedGraph& graph,
                                           const SubgraphSelection& selection) {
  check_selection(graph, selection);
  UndirectedMultigraph out;
  out.node_count = graph.node_count();
  out.edges.reserve(selection.edges.size());
  for (auto idx : selection.edges) {
    const auto& e = graph.edge(idx);
    out.edges.emplace_back(e.tail, e.head);
  }
  return out;
}

MixedGraph build_total_digraph(const EntropyOracle& oracle) {
  const int n = oracle.size();
  if (n < 2) throw std::invalid_argument("build_total_digraph: need at least 2 sources");
  MixedGraph g(n);
  for (int i = 0; i < n; ++i) g.add_directed(g.star_of(i), i, oracle.marginal(i));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) g.add_directed(i, j, oracle.conditional(j, i));
    }
  }
  return g;
}

MixedGraph rooted_variant(const MixedGraph& total, int root) {
  const int n = total.regular_count();
  if (root < 0 || root >= n) throw std::invalid_argument("rooted_variant: root out of range");
  MixedGraph g(n);
  for (const auto& e : total.edges()) {
    if (total.is_starred(e.tail) && e.head != root) continue;
    if (!total.contains(e.tail) || !total.contains(e.head)) continue;
    if (e.kind == EdgeKind::directed) {
      g.add_directed(e.tail, e.head, e.weight);
    } else {
      g.add_undirected(e.tail, e.head, e.weight);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (i != root) g.remove_node(g.star_of(i));
    if (!total.contains(i) && g.contains(i)) g.remove_node(i);
  }
  return g;
}

TestGraph build_test_graph(std::span<const double> rates, const EntropyOracle& oracle) {
  check_rates(rates, oracle);
  const int n = oracle.size();
  TestGraph out{MixedGraph(n), {}};
  auto& g = out.graph;
  for (int i = 0; i < n; ++i) {
    const double r = rates[static_cast<std::size_t>(i)];
    if (r >= oracle.marginal(i) - kRateSlack) {
      g.add_directed(g.star_of(i), i, oracle.marginal(i));
      out.parent_set.push_back(g.star_of(i));
    }
    for (int j = 0; j < n; ++j) {
      if (j != i && r >= oracle.conditional(i, j) - kRateSlack) {
        g.add_directed(j, i, oracle.conditional(i, j));
      }
    }
  }
  g.remove_isolated_nodes();
  return out;
}

bool in_sw_region(const PairEntropies& h, double rate_i, double rate_j) {
  return rate_i >= h.h_i_given_j - kRateSlack && rate_j >= h.h_j_given_i - kRateSlack &&
         rate_i + rate_j >= h.h_ij - kRateSlack;
}

PairOptimizer make_pair_optimizer(const EntropyOracle& oracle, const ChannelModel& channel,
                                  bool clamp_at_zero) {
  return [&oracle, &channel, clamp_at_zero](int i, int j) {
    return per_pair_power_optimum(oracle, channel, i, j, clamp_at_zero);
  };
}

MixedGraph build_mixed_total_graph(const EntropyOracle& oracle, const ChannelModel& channel,
                                   const PairOptimizer& per_pair, bool clamp_at_zero) {
  const int n = oracle.size();
  if (n < 2) throw std::invalid_argument("build_mixed_total_graph: need at least 2 sources");
  if (channel.size() != n) throw std::invalid_argument("channel/oracle size mismatch");
  const double cap = channel.peak_power() + kPowerSlack;
  MixedGraph g(n);
  for (int i = 0; i < n; ++i) {
    const double w = channel.power_surrogate(i, effective_rate(oracle.marginal(i), clamp_at_zero));
    if (w <= cap) g.add_directed(g.star_of(i), i, w);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w =
          channel.power_surrogate(j, effective_rate(oracle.conditional(j, i), clamp_at_zero));
      if (w <= cap) g.add_directed(i, j, w);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const PairOptimum p = per_pair(i, j);
      if (p.feasible) g.add_undirected(i, j, p.sum_power());
    }
  }
  return g;
}

MixedGraph build_mixed_test_graph(std::span<const double> rates, const EntropyOracle& oracle,
                                  const ChannelModel& channel, const PairOptimizer& per_pair,
                                  bool clamp_at_zero) {
  check_rates(rates, oracle);
  const int n = oracle.size();
  if (channel.size() != n) throw std::invalid_argument("channel/oracle size mismatch");
  MixedGraph g(n);
  for (int i = 0; i < n; ++i) {
    const double r = rates[static_cast<std::size_t>(i)];
    if (r >= oracle.marginal(i) - kRateSlack) {
      g.add_directed(g.star_of(i), i,
                     channel.power_surrogate(i, effective_rate(oracle.marginal(i), clamp_at_zero)));
    }
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double h = oracle.conditional(i, j);
      if (r >= h - kRateSlack) {
        g.add_directed(j, i, channel.power_surrogate(i, effective_rate(h, clamp_at_zero)));
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!in_sw_region(oracle.pair(i, j), rates[static_cast<std::size_t>(i)],
                        rates[static_cast<std::size_t>(j)])) {
        continue;
      }
      const PairOptimum p = per_pair(i, j);
      if (p.feasible) g.add_undirected(i, j, p.sum_power());
    }
  }
  g.remove_isolated_nodes();
  return g;
}

WeightTransform weight_transform(const MixedGraph& graph) {
  double lambda = 1.0;
  for (const auto& e : graph.edges()) lambda += std::abs(e.weight);
  WeightTransform out{MixedGraph(graph.regular_count()), lambda};
  for (const auto& e : graph.edges()) {
    if (e.kind == EdgeKind::directed) {
      out.graph.add_directed(e.tail, e.head, lambda - e.weight);
    } else {
      out.graph.add_undirected(e.tail, e.head, 2.0 * lambda - e.weight);
    }
  }
  for (int v = 0; v < graph.node_count(); ++v) {
    if (!graph.contains(v)) out.graph.remove_node(v);
  }
  return out;
}

}  // namespace pwalloc
