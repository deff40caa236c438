#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "arborescence_core.hpp"
#include "pwalloc/solvers.hpp"

namespace pwalloc {

bool is_matching_forest(const MixedGraph& graph, const SubgraphSelection& selection) {
  check_selection(graph, selection);
  for (int v = 0; v < graph.node_count(); ++v) {
    if (graph.contains(v) && head_count(graph, selection, v) > 1) return false;
  }
  return !underlying_undirected(graph, selection).has_cycle();
}

bool is_strict_matching_forest(const MixedGraph& graph, const SubgraphSelection& selection) {
  if (!is_matching_forest(graph, selection)) return false;
  for (int v : graph.present_regular_nodes()) {
    if (head_count(graph, selection, v) != 1) return false;
  }
  return true;
}

namespace {

struct PairOption {
  int partner;
  double weight;
  std::size_t edge;
};

struct InArc {
  int tail;
  double weight;
};

// Branch-and-bound over pairing decisions. A regular node is either paired
// through an undirected edge or unpaired; unpaired nodes are covered by a
// starred or directed edge, which the arborescence bound resolves exactly.
class SmfSearcher {
 public:
  SmfSearcher(const MixedGraph& graph, const SmfOptions& options)
      : graph_(graph), options_(options), nodes_(graph.present_regular_nodes()) {
    const int m = size();
    std::vector<int> local(static_cast<std::size_t>(graph.node_count()), -1);
    for (int k = 0; k < m; ++k) local[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(k)])] = k;
    star_.assign(static_cast<std::size_t>(m), kInfinity);
    pairs_.resize(static_cast<std::size_t>(m));
    in_arcs_.resize(static_cast<std::size_t>(m));
    for (std::size_t idx = 0; idx < graph.edge_count(); ++idx) {
      const auto& e = graph.edge(idx);
      if (e.kind == EdgeKind::undirected) {
        const int a = local[static_cast<std::size_t>(e.tail)];
        const int b = local[static_cast<std::size_t>(e.head)];
        pairs_[static_cast<std::size_t>(a)].push_back({b, e.weight, idx});
        pairs_[static_cast<std::size_t>(b)].push_back({a, e.weight, idx});
      } else if (graph.is_starred(e.tail)) {
        star_[static_cast<std::size_t>(local[static_cast<std::size_t>(e.head)])] = e.weight;
      } else {
        in_arcs_[static_cast<std::size_t>(local[static_cast<std::size_t>(e.head)])].push_back(
            {local[static_cast<std::size_t>(e.tail)], e.weight});
      }
    }
    for (auto& list : pairs_) {
      std::stable_sort(list.begin(), list.end(), [](const PairOption& a, const PairOption& b) {
        return a.weight < b.weight;
      });
    }
    double spread = 0.0;
    for (const auto& e : graph.edges()) spread += std::abs(e.weight);
    scale_ = std::max(spread / std::max<double>(1.0, static_cast<double>(graph.edge_count())), 1e-12);
    status_.assign(static_cast<std::size_t>(m), kFree);
    start_ = std::chrono::steady_clock::now();
  }

  SmfSearch run() {
    SmfSearch out;
    std::vector<double> lambda(graph_.edge_count(), 0.0);
    // Incumbent without any pairing: starred and directed edges only.
    status_.assign(status_.size(), kUnpaired);
    Relaxation plain = relax(lambda);
    if (plain.feasible) {
      best_weight_ = total_weight(graph_, plain.selection);
      best_ = std::move(plain.selection);
    }
    status_.assign(status_.size(), kFree);
    search(std::move(lambda), kRootIterations);
    out.exact = !timed_out_;
    out.nodes_explored = explored_;
    if (best_weight_ < kInfinity) {
      MatchingForest f;
      f.selection = best_;
      f.weight = best_weight_;
      f.strict = true;
      out.forest = std::move(f);
    }
    return out;
  }

 private:
  static constexpr int kFree = -1;
  static constexpr int kUnpaired = -2;
  // status_ >= 0 holds the index into pairs_[i] of the chosen pairing.

  struct Relaxation {
    double bound = kInfinity;
    bool feasible = false;        // the relaxed optimum is itself a strict matching forest
    int branch_node = -1;         // free node whose half pair is not reciprocated
    std::vector<int> pair_choice;  // per node: pair option behind its source arc, or -1
    SubgraphSelection selection;  // valid only when feasible
  };

  int size() const { return static_cast<int>(nodes_.size()); }
  int status(int i) const { return status_[static_cast<std::size_t>(i)]; }

  // Share of pairing `p` charged to node i. The multipliers move weight
  // between the two endpoints; any split keeps the bound valid.
  double half(int i, const PairOption& p, const std::vector<double>& lambda) const {
    const double l = lambda[p.edge];
    return 0.5 * p.weight + (i < p.partner ? l : -l);
  }

  bool out_of_time() {
    if (timed_out_) return true;
    if (std::isinf(options_.budget_seconds)) return false;
    if ((explored_ & 63U) != 0) return false;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    timed_out_ = elapsed.count() > options_.budget_seconds;
    return timed_out_;
  }

  // Minimum arborescence from a super source. A pairing contributes half its
  // weight as a source arc to each endpoint; a free node takes the cheaper of
  // its starred edge and its best available half pair.
  Relaxation relax(const std::vector<double>& lambda) const {
    const int m = size();
    const int root = m;
    std::vector<detail::Arc> arcs;
    std::vector<int> source_pair;  // per arc: pair option index for half-pair source arcs, else -1
    for (int i = 0; i < m; ++i) {
      const int st = status(i);
      if (st >= 0) {
        const auto& p = pairs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(st)];
        arcs.push_back({root, i, 0.5 * p.weight});
        source_pair.push_back(st);
        continue;
      }
      for (const auto& a : in_arcs_[static_cast<std::size_t>(i)]) {
        arcs.push_back({a.tail, i, a.weight});
        source_pair.push_back(-1);
      }
      double best = star_[static_cast<std::size_t>(i)];
      int best_pair = -1;
      if (st == kFree) {
        const auto& list = pairs_[static_cast<std::size_t>(i)];
        for (int k = 0; k < static_cast<int>(list.size()); ++k) {
          const auto& p = list[static_cast<std::size_t>(k)];
          if (status(p.partner) != kFree) continue;
          const double h = half(i, p, lambda);
          if (h < best) {
            best = h;
            best_pair = k;
          }
        }
      }
      if (best < kInfinity) {
        arcs.push_back({root, i, best});
        source_pair.push_back(best_pair);
      }
    }

    Relaxation out;
    const auto chosen = detail::min_arborescence(m + 1, root, arcs);
    if (!chosen) return out;

    std::vector<int>& pair_choice = out.pair_choice;
    pair_choice.assign(static_cast<std::size_t>(m), -1);
    std::vector<char> from_source(static_cast<std::size_t>(m), 0);
    std::vector<int> tail_of(static_cast<std::size_t>(m), -1);
    std::vector<std::size_t> order(*chosen);
    std::sort(order.begin(), order.end());
    double bound = 0.0;
    for (auto a : order) {
      const auto& arc = arcs[a];
      bound += arc.weight;
      if (arc.tail == root) {
        from_source[static_cast<std::size_t>(arc.head)] = 1;
        pair_choice[static_cast<std::size_t>(arc.head)] = source_pair[a];
      } else {
        tail_of[static_cast<std::size_t>(arc.head)] = arc.tail;
      }
    }
    out.bound = bound;

    out.feasible = true;
    for (int i = 0; i < m; ++i) {
      if (status(i) != kFree) continue;
      const int k = pair_choice[static_cast<std::size_t>(i)];
      if (k < 0) continue;
      const auto& p = pairs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      const int back = pair_choice[static_cast<std::size_t>(p.partner)];
      const bool mutual =
          back >= 0 &&
          pairs_[static_cast<std::size_t>(p.partner)][static_cast<std::size_t>(back)].edge == p.edge;
      if (!mutual) {
        out.feasible = false;
        out.branch_node = i;
        return out;
      }
    }

    for (int i = 0; i < m; ++i) {
      const int gi = nodes_[static_cast<std::size_t>(i)];
      if (!from_source[static_cast<std::size_t>(i)]) {
        const int t = nodes_[static_cast<std::size_t>(tail_of[static_cast<std::size_t>(i)])];
        out.selection.edges.push_back(*graph_.find_directed(t, gi));
        continue;
      }
      const int k = pair_choice[static_cast<std::size_t>(i)];
      if (k < 0) {
        out.selection.edges.push_back(*graph_.find_directed(graph_.star_of(gi), gi));
      } else {
        const auto& p = pairs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        if (i < p.partner) out.selection.edges.push_back(p.edge);
      }
    }
    std::sort(out.selection.edges.begin(), out.selection.edges.end());
    return out;
  }

  int partner_index(int node, std::size_t edge) const {
    const auto& list = pairs_[static_cast<std::size_t>(node)];
    for (int k = 0; k < static_cast<int>(list.size()); ++k) {
      if (list[static_cast<std::size_t>(k)].edge == edge) return k;
    }
    return -1;
  }

  bool worse_or_equal(double bound) const {
    return bound >= best_weight_ + 1e-12 * std::max(1.0, std::abs(best_weight_));
  }

  void search(std::vector<double> lambda, int iterations) {
    ++explored_;
    if (out_of_time()) return;

    Relaxation r;
    for (int it = 0;; ++it) {
      r = relax(lambda);
      if (worse_or_equal(r.bound)) return;
      if (r.feasible) {
        const double w = total_weight(graph_, r.selection);
        if (w < best_weight_) {
          best_weight_ = w;
          best_ = std::move(r.selection);
        }
        return;
      }
      if (it + 1 >= iterations) break;

      // Subgradient step on the pairing consistency constraints.
      std::vector<std::pair<std::size_t, double>> g;
      for (int i = 0; i < size(); ++i) {
        if (status(i) != kFree) continue;
        const int k = r.pair_choice[static_cast<std::size_t>(i)];
        if (k < 0) continue;
        const auto& p = pairs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        const double sign = i < p.partner ? 1.0 : -1.0;
        auto it_g = std::find_if(g.begin(), g.end(), [&](const auto& x) { return x.first == p.edge; });
        if (it_g == g.end()) {
          g.emplace_back(p.edge, sign);
        } else {
          it_g->second += sign;
        }
      }
      double norm = 0.0;
      for (const auto& [e, v] : g) norm += v * v;
      if (norm == 0.0) break;
      const double gap = std::isfinite(best_weight_) ? best_weight_ - r.bound : scale_;
      const double step = kStepFactor * gap / norm;
      for (const auto& [e, v] : g) lambda[e] += step * v;
    }

    // Children: pair i with each free partner (cheapest first), then leave i unpaired.
    const int i = r.branch_node;
    const auto& list = pairs_[static_cast<std::size_t>(i)];
    for (int k = 0; k < static_cast<int>(list.size()); ++k) {
      const auto& p = list[static_cast<std::size_t>(k)];
      if (status(p.partner) != kFree) continue;
      status_[static_cast<std::size_t>(i)] = k;
      status_[static_cast<std::size_t>(p.partner)] = partner_index(p.partner, p.edge);
      search(lambda, kChildIterations);
      status_[static_cast<std::size_t>(p.partner)] = kFree;
      status_[static_cast<std::size_t>(i)] = kFree;
      if (timed_out_) return;
    }
    status_[static_cast<std::size_t>(i)] = kUnpaired;
    search(std::move(lambda), kChildIterations);
    status_[static_cast<std::size_t>(i)] = kFree;
  }

  static constexpr int kRootIterations = 60;
  static constexpr int kChildIterations = 8;
  static constexpr double kStepFactor = 0.5;

  const MixedGraph& graph_;
  SmfOptions options_;
  std::vector<int> nodes_;
  std::vector<double> star_;
  std::vector<std::vector<PairOption>> pairs_;
  std::vector<std::vector<InArc>> in_arcs_;
  std::vector<int> status_;
  double best_weight_ = kInfinity;
  SubgraphSelection best_;
  std::size_t explored_ = 0;
  bool timed_out_ = false;
  std::chrono::steady_clock::time_point start_;
  double scale_ = 1.0;
};

}  // namespace

SmfSearch min_weight_strict_matching_forest(const MixedGraph& graph, const SmfOptions& options) {
  return SmfSearcher(graph, options).run();
}

}  // namespace pwalloc
