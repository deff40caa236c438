#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pwalloc/solvers.hpp"

namespace pwalloc {

namespace {

void record(EnumerationResult& out, const MixedGraph& graph, SubgraphSelection selection) {
  std::sort(selection.edges.begin(), selection.edges.end());
  ++out.feasible_count;
  const double w = total_weight(graph, selection);
  if (w < out.best_weight) {
    out.best_weight = w;
    out.optima.clear();
  }
  if (w == out.best_weight) out.optima.push_back(std::move(selection));
}

void check_cap(const MixedGraph& graph, int cap, const char* what) {
  if (graph.regular_count() > cap) {
    throw std::invalid_argument(std::string(what) + " enumeration refused above " +
                                std::to_string(cap) + " regular nodes");
  }
}

EnumerationResult enumerate_arborescences(const MixedGraph& graph, int root) {
  if (!graph.is_digraph()) throw std::invalid_argument("arborescence enumeration needs a digraph");
  if (root < 0 || root >= graph.node_count() || !graph.contains(root)) {
    throw std::invalid_argument("arborescence enumeration needs a present root");
  }
  EnumerationResult out;
  std::vector<int> nodes;
  std::vector<std::vector<std::size_t>> in_edges;
  for (int v = 0; v < graph.node_count(); ++v) {
    if (!graph.contains(v) || v == root) continue;
    nodes.push_back(v);
    in_edges.emplace_back();
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
      if (graph.edge(k).head == v) in_edges.back().push_back(k);
    }
    if (in_edges.back().empty()) return out;
  }

  std::vector<std::size_t> choice(nodes.size(), 0);
  std::vector<int> parent(static_cast<std::size_t>(graph.node_count()), -1);
  while (true) {
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      parent[static_cast<std::size_t>(nodes[a])] = graph.edge(in_edges[a][choice[a]]).tail;
    }
    // Every node must reach the root by following parents.
    bool ok = true;
    for (std::size_t a = 0; a < nodes.size() && ok; ++a) {
      int v = nodes[a];
      std::size_t steps = 0;
      while (v != root && steps <= nodes.size()) {
        v = parent[static_cast<std::size_t>(v)];
        ++steps;
      }
      ok = v == root;
    }
    if (ok) {
      SubgraphSelection s;
      for (std::size_t a = 0; a < nodes.size(); ++a) s.edges.push_back(in_edges[a][choice[a]]);
      record(out, graph, std::move(s));
    }
    std::size_t a = 0;
    while (a < nodes.size() && ++choice[a] == in_edges[a].size()) choice[a++] = 0;
    if (a == nodes.size()) break;
  }
  return out;
}

class MatchingEnumerator {
 public:
  explicit MatchingEnumerator(const MixedGraph& graph)
      : graph_(graph), nodes_(graph.present_regular_nodes()),
        covered_(static_cast<std::size_t>(graph.node_count()), 0) {}

  EnumerationResult run() {
    singles_left_ = static_cast<int>(nodes_.size() % 2);
    recurse(0);
    return std::move(out_);
  }

 private:
  void recurse(std::size_t pos) {
    while (pos < nodes_.size() && covered_[static_cast<std::size_t>(nodes_[pos])]) ++pos;
    if (pos == nodes_.size()) {
      if (singles_left_ == 0) record(out_, graph_, current_);
      return;
    }
    const int i = nodes_[pos];
    covered_[static_cast<std::size_t>(i)] = 1;
    if (singles_left_ > 0) {
      if (auto e = graph_.find_directed(graph_.star_of(i), i)) {
        --singles_left_;
        current_.edges.push_back(*e);
        recurse(pos + 1);
        current_.edges.pop_back();
        ++singles_left_;
      }
    }
    for (std::size_t q = pos + 1; q < nodes_.size(); ++q) {
      const int j = nodes_[q];
      if (covered_[static_cast<std::size_t>(j)]) continue;
      if (auto e = graph_.find_undirected(i, j)) {
        covered_[static_cast<std::size_t>(j)] = 1;
        current_.edges.push_back(*e);
        recurse(pos + 1);
        current_.edges.pop_back();
        covered_[static_cast<std::size_t>(j)] = 0;
      }
    }
    covered_[static_cast<std::size_t>(i)] = 0;
  }

  const MixedGraph& graph_;
  std::vector<int> nodes_;
  std::vector<char> covered_;
  int singles_left_ = 0;
  SubgraphSelection current_;
  EnumerationResult out_;
};

// Every matching forest assigns each regular node at most one covering edge,
// so walking the nodes in order and choosing a cover (or none) reaches every
// forest exactly once. Each one is rechecked from scratch before it is visited.
class ForestEnumerator {
 public:
  ForestEnumerator(const MixedGraph& graph, bool strict_only,
                   const std::function<void(const SubgraphSelection&)>& visit)
      : graph_(graph), strict_only_(strict_only), visit_(visit),
        nodes_(graph.present_regular_nodes()),
        covered_(static_cast<std::size_t>(graph.node_count()), 0),
        component_(static_cast<std::size_t>(graph.node_count())) {
    std::iota(component_.begin(), component_.end(), 0);
    in_edges_.resize(static_cast<std::size_t>(graph.node_count()));
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
      const auto& e = graph.edge(k);
      if (e.kind == EdgeKind::directed) {
        in_edges_[static_cast<std::size_t>(e.head)].push_back(k);
      } else {
        // Listed under the smaller endpoint, which is visited first.
        in_edges_[static_cast<std::size_t>(e.tail)].push_back(k);
      }
    }
  }

  void run() { recurse(0); }

 private:
  void merge(int a, int b) {
    const int from = component_[static_cast<std::size_t>(b)];
    const int to = component_[static_cast<std::size_t>(a)];
    for (auto& c : component_) {
      if (c == from) c = to;
    }
  }

  void recurse(std::size_t pos) {
    while (pos < nodes_.size() && covered_[static_cast<std::size_t>(nodes_[pos])]) ++pos;
    if (pos == nodes_.size()) {
      SubgraphSelection s = current_;
      std::sort(s.edges.begin(), s.edges.end());
      const bool ok = strict_only_ ? is_strict_matching_forest(graph_, s)
                                   : is_matching_forest(graph_, s);
      if (!ok) throw std::logic_error("enumerated selection fails the matching forest definition");
      visit_(s);
      return;
    }
    const int i = nodes_[pos];
    if (!strict_only_) recurse(pos + 1);
    covered_[static_cast<std::size_t>(i)] = 1;
    for (std::size_t k : in_edges_[static_cast<std::size_t>(i)]) {
      const auto& e = graph_.edge(k);
      const int other = e.kind == EdgeKind::directed ? e.tail : e.head;
      if (e.kind == EdgeKind::undirected && covered_[static_cast<std::size_t>(other)]) continue;
      if (component_[static_cast<std::size_t>(other)] == component_[static_cast<std::size_t>(i)]) {
        continue;
      }
      const auto saved = component_;
      merge(i, other);
      if (e.kind == EdgeKind::undirected) covered_[static_cast<std::size_t>(other)] = 1;
      current_.edges.push_back(k);
      recurse(pos + 1);
      current_.edges.pop_back();
      if (e.kind == EdgeKind::undirected) covered_[static_cast<std::size_t>(other)] = 0;
      component_ = saved;
    }
    covered_[static_cast<std::size_t>(i)] = 0;
  }

  const MixedGraph& graph_;
  bool strict_only_;
  const std::function<void(const SubgraphSelection&)>& visit_;
  std::vector<int> nodes_;
  std::vector<char> covered_;
  std::vector<int> component_;
  std::vector<std::vector<std::size_t>> in_edges_;
  SubgraphSelection current_;
};

}  // namespace

EnumerationResult brute_force_enumerate(const MixedGraph& graph, EnumerationKind kind, int root) {
  switch (kind) {
    case EnumerationKind::arborescence:
      check_cap(graph, kEnumerationMaxNodes, "arborescence");
      return enumerate_arborescences(graph, root);
    case EnumerationKind::matching:
      check_cap(graph, kMatchingEnumerationMaxNodes, "matching");
      return MatchingEnumerator(graph).run();
    case EnumerationKind::strict_matching_forest: {
      check_cap(graph, kEnumerationMaxNodes, "matching forest");
      EnumerationResult out;
      for_each_matching_forest(graph, true, [&](const SubgraphSelection& s) {
        record(out, graph, s);
      });
      return out;
    }
  }
  throw std::invalid_argument("unknown enumeration kind");
}

void for_each_matching_forest(const MixedGraph& graph, bool strict_only,
                              const std::function<void(const SubgraphSelection&)>& visit) {
  check_cap(graph, kEnumerationMaxNodes, "matching forest");
  ForestEnumerator(graph, strict_only, visit).run();
}

std::optional<MatchingForest> max_weight_matching_forest_enumerate(const MixedGraph& graph) {
  std::optional<MatchingForest> best;
  for_each_matching_forest(graph, false, [&](const SubgraphSelection& s) {
    const double w = total_weight(graph, s);
    if (!best || w > best->weight) {
      best = MatchingForest{s, w, is_strict_matching_forest(graph, s)};
    }
  });
  return best;
}

}  // namespace pwalloc
