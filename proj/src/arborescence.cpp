#include <algorithm>
#include <queue>
#include <string>
#include <tuple>

#include "arborescence_core.hpp"
#include "pwalloc/solvers.hpp"

namespace pwalloc {

namespace detail {

namespace {

struct WorkEdge {
  int from;
  int to;
  double weight;
  std::size_t ref;  // index of this edge one contraction level up
  std::size_t arc;  // index into the input arcs
};

class Edmonds {
 public:
  explicit Edmonds(const std::vector<Arc>& arcs) : arcs_(arcs) {}

  // Level-local indices of a minimum arborescence of `edges`.
  std::vector<std::size_t> solve(int node_count, int root, const std::vector<WorkEdge>& edges) {
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> best(static_cast<std::size_t>(node_count), kNone);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& e = edges[k];
      if (e.to == root || e.from == e.to) continue;
      auto& b = best[static_cast<std::size_t>(e.to)];
      if (b == kNone || less(e, edges[b])) b = k;
    }

    std::vector<int> state(static_cast<std::size_t>(node_count), 0);  // 0 new, 1 on walk, 2 done
    std::vector<int> cycle;
    for (int start = 0; start < node_count && cycle.empty(); ++start) {
      if (state[static_cast<std::size_t>(start)] != 0) continue;
      std::vector<int> walk;
      int v = start;
      while (v != root && state[static_cast<std::size_t>(v)] == 0) {
        state[static_cast<std::size_t>(v)] = 1;
        walk.push_back(v);
        v = edges[best[static_cast<std::size_t>(v)]].from;
      }
      if (v != root && state[static_cast<std::size_t>(v)] == 1) {
        cycle.assign(std::find(walk.begin(), walk.end(), v), walk.end());
      }
      for (int w : walk) state[static_cast<std::size_t>(w)] = 2;
    }

    if (cycle.empty()) {
      std::vector<std::size_t> out;
      for (int v = 0; v < node_count; ++v) {
        if (v != root) out.push_back(best[static_cast<std::size_t>(v)]);
      }
      return out;
    }

    std::vector<char> in_cycle(static_cast<std::size_t>(node_count), 0);
    for (int v : cycle) in_cycle[static_cast<std::size_t>(v)] = 1;
    std::vector<int> relabel(static_cast<std::size_t>(node_count), -1);
    int next = 0;
    for (int v = 0; v < node_count; ++v) {
      if (!in_cycle[static_cast<std::size_t>(v)]) relabel[static_cast<std::size_t>(v)] = next++;
    }
    const int merged = next++;
    for (int v : cycle) relabel[static_cast<std::size_t>(v)] = merged;

    std::vector<WorkEdge> reduced;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& e = edges[k];
      const int a = relabel[static_cast<std::size_t>(e.from)];
      const int b = relabel[static_cast<std::size_t>(e.to)];
      if (a == b) continue;
      double w = e.weight;
      if (in_cycle[static_cast<std::size_t>(e.to)]) {
        w -= edges[best[static_cast<std::size_t>(e.to)]].weight;
      }
      reduced.push_back(WorkEdge{a, b, w, k, e.arc});
    }

    const auto chosen = solve(next, relabel[static_cast<std::size_t>(root)], reduced);
    std::vector<std::size_t> out;
    int entered = -1;
    for (auto idx : chosen) {
      const auto k = reduced[idx].ref;
      out.push_back(k);
      if (reduced[idx].to == merged) entered = edges[k].to;
    }
    for (int v : cycle) {
      if (v != entered) out.push_back(best[static_cast<std::size_t>(v)]);
    }
    return out;
  }

 private:
  bool less(const WorkEdge& a, const WorkEdge& b) const {
    const auto& oa = arcs_[a.arc];
    const auto& ob = arcs_[b.arc];
    return std::tie(a.weight, oa.tail, oa.head) < std::tie(b.weight, ob.tail, ob.head);
  }

  const std::vector<Arc>& arcs_;
};

}  // namespace

std::optional<std::vector<std::size_t>> min_arborescence(int node_count, int root,
                                                         const std::vector<Arc>& arcs,
                                                         int* unreachable) {
  std::vector<std::vector<int>> out_adj(static_cast<std::size_t>(node_count));
  std::vector<WorkEdge> edges;
  edges.reserve(arcs.size());
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const auto& a = arcs[k];
    if (a.head == root || a.tail == a.head) continue;
    out_adj[static_cast<std::size_t>(a.tail)].push_back(a.head);
    edges.push_back(WorkEdge{a.tail, a.head, a.weight, edges.size(), k});
  }

  std::vector<char> seen(static_cast<std::size_t>(node_count), 0);
  std::queue<int> frontier;
  seen[static_cast<std::size_t>(root)] = 1;
  frontier.push(root);
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : out_adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        frontier.push(w);
      }
    }
  }
  for (int v = 0; v < node_count; ++v) {
    if (!seen[static_cast<std::size_t>(v)]) {
      if (unreachable != nullptr) *unreachable = v;
      return std::nullopt;
    }
  }

  Edmonds solver(arcs);
  const auto chosen = solver.solve(node_count, root, edges);
  std::vector<std::size_t> out;
  out.reserve(chosen.size());
  for (auto k : chosen) out.push_back(edges[k].arc);
  return out;
}

}  // namespace detail

Arborescence min_weight_arborescence(const MixedGraph& graph, int root) {
  if (!graph.is_digraph()) throw std::invalid_argument("arborescence needs a digraph");
  if (!graph.contains(root)) throw std::invalid_argument("arborescence root is not in the graph");

  std::vector<int> local(static_cast<std::size_t>(graph.node_count()), -1);
  std::vector<int> global;
  for (int v = 0; v < graph.node_count(); ++v) {
    if (graph.contains(v)) {
      local[static_cast<std::size_t>(v)] = static_cast<int>(global.size());
      global.push_back(v);
    }
  }

  // Local numbering preserves node order, so ties still break on graph ids.
  std::vector<detail::Arc> arcs;
  arcs.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) {
    arcs.push_back(detail::Arc{local[static_cast<std::size_t>(e.tail)],
                               local[static_cast<std::size_t>(e.head)], e.weight});
  }

  int unreachable = -1;
  const auto chosen = detail::min_arborescence(static_cast<int>(global.size()),
                                               local[static_cast<std::size_t>(root)], arcs,
                                               &unreachable);
  if (!chosen) {
    const int node = global[static_cast<std::size_t>(unreachable)];
    throw NoArborescence("node " + std::to_string(node) + " is unreachable from the root", node);
  }

  Arborescence out;
  out.root = root;
  out.selection.edges = *chosen;
  std::sort(out.selection.edges.begin(), out.selection.edges.end());
  out.weight = total_weight(graph, out.selection);
  return out;
}

}  // namespace pwalloc
