// Exact combinatorial solvers: minimum-weight arborescence, minimum-weight
// (near-)perfect matching, minimum-weight strict matching forest, and the
// exhaustive enumerators used to check them on small graphs.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pwalloc/graphs.hpp"

namespace pwalloc {

class NoArborescence : public std::runtime_error {
 public:
  NoArborescence(const std::string& what, int node) : std::runtime_error(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

struct Arborescence {
  int root = 0;
  SubgraphSelection selection;
  double weight = 0.0;
};

/// Chu-Liu/Edmonds contraction over the present nodes of a digraph. Ties are
/// broken by (weight, tail, head). Throws NoArborescence naming the lowest
/// unreachable node.
Arborescence min_weight_arborescence(const MixedGraph& graph, int root);

/// Dense symmetric pair costs; +inf marks a missing edge.
class PairCosts {
 public:
  explicit PairCosts(int n);
  int size() const { return n_; }
  void set(int i, int j, double w);
  double operator()(int i, int j) const {
    return w_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
              static_cast<std::size_t>(j)];
  }
  bool has(int i, int j) const;

 private:
  int n_;
  std::vector<double> w_;
};

class InfeasibleMatching : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Matching {
  std::vector<std::pair<int, int>> pairs;  ///< i < j, sorted
  std::vector<int> singles;                ///< unmatched nodes, charged singleton cost
  double weight = 0.0;
};

/// Subset dynamic programming up to this many nodes; blossom beyond.
inline constexpr int kMatchingDpMaxNodes = 20;

/// Minimum-weight matching. With `require_perfect` every node is covered and
/// exactly n mod 2 nodes stay single, each charged `singleton_costs[i]`
/// (+inf forbids it). Otherwise any node may stay single at its singleton
/// cost (default 0). Throws InfeasibleMatching when no admissible cover exists.
Matching min_weight_matching(const PairCosts& costs, bool require_perfect,
                             std::span<const double> singleton_costs = {});

struct MatchingForest {
  SubgraphSelection selection;
  double weight = 0.0;
  bool strict = false;
};

bool is_matching_forest(const MixedGraph& graph, const SubgraphSelection& selection);
bool is_strict_matching_forest(const MixedGraph& graph, const SubgraphSelection& selection);

struct SmfOptions {
  /// Wall-clock budget. Search is exact within budget; beyond it the best
  /// forest found so far is returned with `exact == false`.
  double budget_seconds = kInfinity;
};

struct SmfSearch {
  std::optional<MatchingForest> forest;
  bool exact = true;
  std::size_t nodes_explored = 0;

  /// A strict matching forest provably does not exist.
  bool proven_infeasible() const { return exact && !forest; }
};

/// Branch-and-bound over pairing decisions: every regular node is either
/// paired through an undirected edge or covered by a starred or directed
/// in-edge. The bound is a minimum arborescence from a super source in which
/// each undirected edge is split between its endpoints, with the split tuned
/// by Lagrangian subgradient steps. Among equal optima the first one found
/// in the fixed search order is returned.
SmfSearch min_weight_strict_matching_forest(const MixedGraph& graph, const SmfOptions& options = {});

enum class EnumerationKind { arborescence, matching, strict_matching_forest };

struct EnumerationResult {
  double best_weight = kInfinity;
  /// Every optimal witness (exact weight ties), in enumeration order.
  std::vector<SubgraphSelection> optima;
  std::size_t feasible_count = 0;

  bool found() const { return !optima.empty(); }
};

inline constexpr int kEnumerationMaxNodes = 7;
inline constexpr int kMatchingEnumerationMaxNodes = 10;

/// Exhaustive search checked against the definitions. `root` is required for
/// arborescences. The matching kind covers regular nodes with undirected
/// edges plus, for odd counts, one starred edge. Throws std::invalid_argument
/// above the size caps.
EnumerationResult brute_force_enumerate(const MixedGraph& graph, EnumerationKind kind,
                                        int root = -1);

/// Visits every matching forest (every strict one when `strict_only`).
void for_each_matching_forest(const MixedGraph& graph, bool strict_only,
                              const std::function<void(const SubgraphSelection&)>& visit);

/// Maximum-weight matching forest by enumeration (ties: first found).
std::optional<MatchingForest> max_weight_matching_forest_enumerate(const MixedGraph& graph);

}  // namespace pwalloc
