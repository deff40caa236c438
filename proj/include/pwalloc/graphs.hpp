// Mixed graphs over n regular nodes and n starred nodes, and the builders for
// every test/total graph used by the allocation algorithms.
//
// Node numbering: regular node i is `i` (0-based) and its starred companion
// i* is `n + i`. Starred nodes only ever appear as tails of directed edges.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pwalloc/model.hpp"
#include "pwalloc/pair_power.hpp"

namespace pwalloc {

/// Inclusive slack for every rate threshold comparison (bits).
inline constexpr double kRateSlack = 1e-9;
/// Slack on every P_max comparison.
inline constexpr double kPowerSlack = 1e-9;

enum class EdgeKind { directed, undirected };

struct Edge {
  int tail = 0;  ///< smaller endpoint for undirected edges
  int head = 0;
  double weight = 0.0;
  EdgeKind kind = EdgeKind::directed;
};

class MixedGraph {
 public:
  explicit MixedGraph(int regular_count);

  int regular_count() const { return n_; }
  int node_count() const { return 2 * n_; }
  int star_of(int i) const { return n_ + i; }
  bool is_starred(int node) const { return node >= n_; }
  int regular_of(int node) const { return is_starred(node) ? node - n_ : node; }

  /// Throws std::invalid_argument on a starred head, a self loop, an absent
  /// endpoint or a duplicate ordered pair.
  std::size_t add_directed(int tail, int head, double weight);
  /// Both endpoints must be regular; at most one edge per unordered pair.
  std::size_t add_undirected(int u, int v, double weight);

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t index) const { return edges_.at(index); }
  std::size_t edge_count() const { return edges_.size(); }

  std::optional<std::size_t> find_directed(int tail, int head) const;
  std::optional<std::size_t> find_undirected(int u, int v) const;

  bool contains(int node) const;
  bool is_digraph() const;
  std::vector<int> present_regular_nodes() const;

  /// Drops every node that participates in no edge.
  void remove_isolated_nodes();
  /// Drops a node that has no incident edges left. Throws otherwise.
  void remove_node(int node);

 private:
  void check_present(int node) const;
  std::size_t slot(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(2 * n_) +
           static_cast<std::size_t>(b);
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<char> present_;
  std::vector<int> directed_index_;    // 2n x 2n, -1 when absent
  std::vector<int> undirected_index_;  // 2n x 2n, symmetric
};

/// A chosen subset of a graph's edges, by edge index.
struct SubgraphSelection {
  std::vector<std::size_t> edges;

  friend bool operator==(const SubgraphSelection&, const SubgraphSelection&) = default;
};

double total_weight(const MixedGraph& graph, const SubgraphSelection& selection);
SubgraphSelection all_edges(const MixedGraph& graph);
/// Throws std::invalid_argument when an index is out of range.
void check_selection(const MixedGraph& graph, const SubgraphSelection& selection);

/// Number of edges of which `node` is a head. Throws for an unknown node.
int head_count(const MixedGraph& graph, int node);
int head_count(const MixedGraph& graph, const SubgraphSelection& selection, int node);

/// Orientation-erased multigraph. A directed edge and an undirected edge on
/// the same pair stay as two parallel edges.
struct UndirectedMultigraph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;

  bool has_cycle() const;
};

UndirectedMultigraph underlying_undirected(const MixedGraph& graph);
UndirectedMultigraph underlying_undirected(const MixedGraph& graph,
                                           const SubgraphSelection& selection);

/// Digraph with edges i* -> i of weight H(X_i) and i -> j of weight H(X_j | X_i).
MixedGraph build_total_digraph(const EntropyOracle& oracle);

/// Removes every starred node except root* (and its edge).
MixedGraph rooted_variant(const MixedGraph& total, int root);

struct TestGraph {
  MixedGraph graph;
  /// Starred node ids i* whose edge i* -> i is present.
  std::vector<int> parent_set;
};

/// Pairwise test graph G(R): i* -> i iff R_i >= H(X_i), j -> i iff
/// R_i >= H(X_i | X_j); isolated nodes removed.
TestGraph build_test_graph(std::span<const double> rates, const EntropyOracle& oracle);

/// Closed Slepian-Wolf region membership with kRateSlack.
bool in_sw_region(const PairEntropies& h, double rate_i, double rate_j);

using PairOptimizer = std::function<PairOptimum(int, int)>;

/// Per-pair optimizer bound to an oracle and channel.
PairOptimizer make_pair_optimizer(const EntropyOracle& oracle, const ChannelModel& channel,
                                  bool clamp_at_zero);

/// Mixed total graph: starred and cross edges weighted by Q of the
/// (conditional) entropy and kept only when within P_max; undirected edges
/// weighted by the per-pair optimum wherever it is feasible.
MixedGraph build_mixed_total_graph(const EntropyOracle& oracle, const ChannelModel& channel,
                                   const PairOptimizer& per_pair, bool clamp_at_zero);

/// Generalized test graph G_M(R).
MixedGraph build_mixed_test_graph(std::span<const double> rates, const EntropyOracle& oracle,
                                  const ChannelModel& channel, const PairOptimizer& per_pair,
                                  bool clamp_at_zero);

struct WeightTransform {
  MixedGraph graph;
  double lambda = 1.0;
};

/// W'_E = 2 Lambda - W_E and W'_A = Lambda - W_A with Lambda = 1 + sum |w|.
WeightTransform weight_transform(const MixedGraph& graph);

}  // namespace pwalloc
