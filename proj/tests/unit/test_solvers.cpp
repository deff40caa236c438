#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pwalloc/solvers.hpp"

using namespace pwalloc;

namespace {

bool arborescence_ok(const MixedGraph& g, const Arborescence& a) {
  std::vector<int> parent(static_cast<std::size_t>(g.node_count()), -1);
  for (auto k : a.selection.edges) {
    const auto& e = g.edge(k);
    if (e.head == a.root || parent[static_cast<std::size_t>(e.head)] != -1) return false;
    parent[static_cast<std::size_t>(e.head)] = e.tail;
  }
  for (int v = 0; v < g.node_count(); ++v) {
    if (!g.contains(v) || v == a.root) continue;
    int x = v;
    for (int s = 0; s <= g.node_count() && x != a.root && x >= 0; ++s) {
      x = parent[static_cast<std::size_t>(x)];
    }
    if (x != a.root) return false;
  }
  return true;
}

double brute_matching(const PairCosts& c, std::vector<int> left) {
  if (left.empty()) return 0.0;
  const int a = left.front();
  double best = kInfinity;
  for (std::size_t k = 1; k < left.size(); ++k) {
    const int b = left[k];
    if (!c.has(a, b)) continue;
    std::vector<int> rest;
    for (std::size_t m = 1; m < left.size(); ++m) {
      if (m != k) rest.push_back(left[m]);
    }
    best = std::min(best, c(a, b) + brute_matching(c, rest));
  }
  return best;
}

}  // namespace

TEST_CASE("arborescence: unique path") {
  MixedGraph g(3);
  g.add_directed(g.star_of(0), 0, 2.0);
  g.add_directed(0, 1, 1.5);
  g.add_directed(1, 2, 0.25);
  g.remove_node(g.star_of(1));
  g.remove_node(g.star_of(2));
  const auto a = min_weight_arborescence(g, g.star_of(0));
  CHECK(a.weight == 3.75);
  CHECK(a.selection.edges.size() == 3);
  CHECK(arborescence_ok(g, a));
}

TEST_CASE("arborescence: two-cycle forces a contraction") {
  MixedGraph g(3);
  for (int i = 0; i < 3; ++i) g.remove_node(g.star_of(i));
  const int r = 0, a = 1, b = 2;
  g.add_directed(a, b, 1.0);
  g.add_directed(b, a, 1.0);
  g.add_directed(r, a, 10.0);
  g.add_directed(r, b, 10.0);
  const auto t = min_weight_arborescence(g, r);
  CHECK(t.weight == 11.0);
  CHECK(arborescence_ok(g, t));
  // Tie between r->a->b and r->b->a: (weight, tail, head) keeps r->a.
  CHECK(std::find(t.selection.edges.begin(), t.selection.edges.end(), 2) != t.selection.edges.end());
}

TEST_CASE("arborescence: unreachable node is named") {
  MixedGraph g(3);
  for (int i = 0; i < 3; ++i) g.remove_node(g.star_of(i));
  g.add_directed(0, 2, 1.0);
  g.add_directed(1, 2, 1.0);
  try {
    (void)min_weight_arborescence(g, 0);
    FAIL("expected NoArborescence");
  } catch (const NoArborescence& e) {
    CHECK(e.node() == 1);
  }
}

TEST_CASE("arborescence agrees with exhaustive search on random digraphs") {
  std::mt19937_64 rng(2024);
  int compared = 0;
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + t % 5;
    const auto g = oracle::random_digraph(n, 0.6, rng);
    const double brute = oracle::brute_arborescence(g, 0);
    const auto lib = brute_force_enumerate(g, EnumerationKind::arborescence, 0);
    if (std::isinf(brute)) {
      CHECK(!lib.found());
      CHECK_THROWS_AS(min_weight_arborescence(g, 0), NoArborescence);
      continue;
    }
    const auto a = min_weight_arborescence(g, 0);
    CHECK(arborescence_ok(g, a));
    CHECK(a.weight == total_weight(g, a.selection));
    CHECK(std::abs(a.weight - brute) <= 1e-12 * std::max(1.0, std::abs(brute)));
    CHECK(a.weight == lib.best_weight);
    ++compared;
  }
  CHECK(compared > 150);
}

TEST_CASE("brute force arborescence enumerates both trees of a two-node digraph") {
  MixedGraph h(2);
  h.remove_node(h.star_of(0));
  h.remove_node(h.star_of(1));
  h.add_directed(0, 1, 2.0);
  h.add_directed(1, 0, 3.0);
  CHECK(brute_force_enumerate(h, EnumerationKind::arborescence, 0).feasible_count == 1);
  CHECK(brute_force_enumerate(h, EnumerationKind::arborescence, 1).feasible_count == 1);
  CHECK(brute_force_enumerate(h, EnumerationKind::arborescence, 0).best_weight == 2.0);
  CHECK(brute_force_enumerate(h, EnumerationKind::arborescence, 1).best_weight == 3.0);
  CHECK_THROWS_AS(brute_force_enumerate(MixedGraph(8), EnumerationKind::arborescence, 0),
                  std::invalid_argument);
}

TEST_CASE("matching: single edge and cross pairing") {
  PairCosts two(2);
  two.set(0, 1, 4.0);
  const auto m2 = min_weight_matching(two, true);
  CHECK(m2.pairs == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(m2.weight == 4.0);

  PairCosts four(4);
  four.set(0, 1, 5.0);
  four.set(2, 3, 5.0);
  four.set(0, 2, 4.0);
  four.set(1, 3, 4.0);
  four.set(0, 3, 1.0);
  four.set(1, 2, 1.0);
  const auto m4 = min_weight_matching(four, true);
  CHECK(m4.pairs == std::vector<std::pair<int, int>>{{0, 3}, {1, 2}});
  CHECK(m4.weight == 2.0);
}

TEST_CASE("matching: odd counts, missing edges and singles") {
  PairCosts three(3);
  three.set(0, 1, 1.0);
  three.set(1, 2, 5.0);
  three.set(0, 2, 5.0);
  const std::vector<double> singles{3.0, 3.0, 0.5};
  const auto m = min_weight_matching(three, true, singles);
  CHECK(m.weight == 1.5);
  CHECK(m.singles == std::vector<int>{2});

  PairCosts gap(4);
  gap.set(0, 1, 1.0);
  gap.set(0, 2, 1.0);
  CHECK_THROWS_AS(min_weight_matching(gap, true), InfeasibleMatching);
  const std::vector<double> cost{2.0, 2.0, 2.0, 2.0};
  const auto partial = min_weight_matching(gap, false, cost);
  CHECK(partial.weight == 5.0);
  CHECK(partial.singles.size() == 2);
}

TEST_CASE("matching agrees with brute force and blossom path above the dp size") {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < 40; ++t) {
    const int n = 2 * (1 + t % 5);
    PairCosts c(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) c.set(i, j, u(rng));
    }
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    const auto m = min_weight_matching(c, true);
    CHECK(std::abs(m.weight - brute_matching(c, all)) < 1e-9);
  }
  // 22 nodes: dp refused, blossom used. Planted optimum of weight 0.
  PairCosts big(22);
  for (int i = 0; i < 22; ++i) {
    for (int j = i + 1; j < 22; ++j) big.set(i, j, (j == i + 1 && i % 2 == 0) ? 0.0 : 1.0 + u(rng));
  }
  const auto mb = min_weight_matching(big, true);
  CHECK(mb.weight == 0.0);
  CHECK(mb.pairs.size() == 11);
}

TEST_CASE("matching on joint entropy weights equals brute force") {
  const EntropyOracle o(generate_network(4, 1.0, 5));
  PairCosts c(4);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) c.set(i, j, o.joint(i, j));
  }
  CHECK(std::abs(min_weight_matching(c, true).weight - brute_matching(c, {0, 1, 2, 3})) < 1e-12);
  MixedGraph g(4);
  for (int i = 0; i < 4; ++i) g.remove_node(g.star_of(i));
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) g.add_undirected(i, j, o.joint(i, j));
  }
  const auto e = brute_force_enumerate(g, EnumerationKind::matching);
  CHECK(e.feasible_count == 3);
  CHECK(std::abs(e.best_weight - min_weight_matching(c, true).weight) < 1e-12);
}

TEST_CASE("matching forest predicates") {
  MixedGraph g(3);
  const auto s0 = g.add_directed(g.star_of(0), 0, 1.0);
  const auto d01 = g.add_directed(0, 1, 1.0);
  const auto d21 = g.add_directed(2, 1, 1.0);
  const auto u12 = g.add_undirected(1, 2, 1.0);
  const auto u01 = g.add_undirected(0, 1, 1.0);
  CHECK(is_matching_forest(g, {{s0, d01}}));
  CHECK(!is_strict_matching_forest(g, {{s0, d01}}));
  CHECK(!is_matching_forest(g, {{d01, d21}}));
  CHECK(!is_matching_forest(g, {{d01, u01}}));
  CHECK(is_strict_matching_forest(g, {{s0, u12}}));
  CHECK(!is_matching_forest(g, {{u01, u12}}));
}

TEST_CASE("smf: only starred edges") {
  MixedGraph g(4);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    g.add_directed(g.star_of(i), i, 1.0 + i);
    sum += 1.0 + i;
  }
  const auto s = min_weight_strict_matching_forest(g);
  REQUIRE(s.forest.has_value());
  CHECK(s.exact);
  CHECK(s.forest->weight == sum);
  CHECK(s.forest->selection.edges.size() == 4);
}

TEST_CASE("smf: a cheap undirected edge wins") {
  MixedGraph g(2);
  g.add_directed(g.star_of(0), 0, 3.0);
  g.add_directed(g.star_of(1), 1, 3.0);
  const auto u = g.add_undirected(0, 1, 5.0);
  const auto s = min_weight_strict_matching_forest(g);
  REQUIRE(s.forest.has_value());
  CHECK(s.forest->selection.edges == std::vector<std::size_t>{u});
  CHECK(s.forest->weight == 5.0);
}

TEST_CASE("smf: nothing to cover a node") {
  MixedGraph g(1);
  g.remove_node(g.star_of(0));
  const auto s = min_weight_strict_matching_forest(g);
  CHECK(s.proven_infeasible());
  CHECK(!brute_force_enumerate(g, EnumerationKind::strict_matching_forest).found());

  MixedGraph cyc(2);
  cyc.remove_node(cyc.star_of(0));
  cyc.remove_node(cyc.star_of(1));
  cyc.add_directed(0, 1, 1.0);
  cyc.add_directed(1, 0, 1.0);
  CHECK(min_weight_strict_matching_forest(cyc).proven_infeasible());
}

TEST_CASE("smf agrees with the definition-level enumerator") {
  std::mt19937_64 rng(4242);
  for (int t = 0; t < 150; ++t) {
    const int n = 2 + t % 6;
    const auto g = oracle::random_mixed_graph(n, 0.6, 0.35, 0.35, -0.5, 6.0, rng);
    const auto e = brute_force_enumerate(g, EnumerationKind::strict_matching_forest);
    const auto s = min_weight_strict_matching_forest(g);
    CHECK(s.exact);
    CHECK(s.forest.has_value() == e.found());
    if (!s.forest) continue;
    CHECK(is_strict_matching_forest(g, s.forest->selection));
    CHECK(s.forest->weight == e.best_weight);
    CHECK(std::find(e.optima.begin(), e.optima.end(), s.forest->selection) != e.optima.end());
  }
}

TEST_CASE("smf on mixed total graphs of six sources") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = generate_network(6, seed % 2 ? 1.0 : 5.0, seed);
    const EntropyOracle o(inst);
    const ChannelModel ch(inst.gains, 10.0);
    const auto g = build_mixed_total_graph(o, ch, make_pair_optimizer(o, ch, true), true);
    const auto e = brute_force_enumerate(g, EnumerationKind::strict_matching_forest);
    const auto s = min_weight_strict_matching_forest(g);
    REQUIRE(s.forest.has_value() == e.found());
    if (s.forest) CHECK(s.forest->weight == e.best_weight);
  }
}

TEST_CASE("smf is deterministic and honours an expired budget") {
  const auto inst = generate_network(14, 5.0, 3);
  const EntropyOracle o(inst);
  const ChannelModel ch(inst.gains, 10.0);
  const auto g = build_mixed_total_graph(o, ch, make_pair_optimizer(o, ch, true), true);
  const auto a = min_weight_strict_matching_forest(g);
  const auto b = min_weight_strict_matching_forest(g);
  REQUIRE(a.forest.has_value());
  CHECK(a.exact);
  CHECK(a.forest->selection == b.forest->selection);
  SmfOptions tight;
  tight.budget_seconds = 0.0;
  const auto c = min_weight_strict_matching_forest(g, tight);
  CHECK(!c.exact);
  if (c.forest) CHECK(c.forest->weight >= a.forest->weight);
}

TEST_CASE("for_each_matching_forest counts") {
  MixedGraph g(2);
  g.add_directed(g.star_of(0), 0, 1.0);
  g.remove_node(g.star_of(1));
  g.add_directed(0, 1, 1.0);
  g.add_undirected(0, 1, 1.0);
  // Forests: {}, {s}, {d}, {u}, {s,d}. {s,u} gives node 0 two heads, {d,u} is a cycle.
  int all = 0, strict = 0;
  for_each_matching_forest(g, false, [&](const SubgraphSelection&) { ++all; });
  for_each_matching_forest(g, true, [&](const SubgraphSelection&) { ++strict; });
  CHECK(all == 5);
  CHECK(strict == 2);
  const auto best = max_weight_matching_forest_enumerate(g);
  REQUIRE(best.has_value());
  CHECK(best->weight == 2.0);
}
