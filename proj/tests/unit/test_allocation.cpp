#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "pwalloc/allocation.hpp"

using namespace pwalloc;

namespace {

constexpr double kH1 = 2.047095585180641;
constexpr double kCondHalf = 1.7162314063661574;
constexpr double kJointHalf = 3.7633269915467985;
// Frozen from the grid oracle (1e-5 step) and the closed form, which agree to 1e-9.
constexpr double kPairRate = 1.8816634957733993;
constexpr double kPairPower = 5.369994260368594;
constexpr double kCornerPower = 5.418501147971044;

NetworkInstance four_source_example() {
  return oracle::instance_at({{0.0, 0.5}, {0.6, 0.5}, {0.3, 0.5}, {0.95, 0.5}}, 1.0);
}

std::array<double, 8> set_function(const EntropyOracle& o) {
  std::array<double, 8> g{};
  for (std::uint64_t s = 1; s < 8; ++s) g[s] = o.subset_conditional(s);
  return g;
}

}  // namespace

TEST_CASE("pair optimum: equal gains split the joint entropy evenly") {
  const PairEntropies h{kH1, kH1, kCondHalf, kCondHalf, kJointHalf};
  const auto p = pair_power_optimum(h, 1.0, 1.0, kInfinity, true);
  REQUIRE(p.feasible);
  CHECK(p.rate_i == doctest::Approx(kJointHalf / 2.0).epsilon(1e-15));
  CHECK(p.rate_j == doctest::Approx(kJointHalf / 2.0).epsilon(1e-15));
  CHECK(p.rate_i == doctest::Approx(kPairRate).epsilon(1e-14));
  CHECK(p.sum_power() == doctest::Approx(kPairPower).epsilon(1e-13));
  const double corner = (std::pow(2.0, kH1) - 1.0) + (std::pow(2.0, kCondHalf) - 1.0);
  CHECK(corner == doctest::Approx(kCornerPower).epsilon(1e-13));
  CHECK(p.sum_power() < corner);

  const auto grid = oracle::grid_pair_power(h, 1.0, 1.0, kInfinity, true, 1e-5);
  CHECK(std::abs(grid.sum_power - kPairPower) < 1e-8);
}

TEST_CASE("pair optimum: infeasible when the cap is below the whole face") {
  const PairEntropies h{kH1, kH1, kCondHalf, kCondHalf, kJointHalf};
  const auto p = pair_power_optimum(h, 1.0, 1.0, 2.0, true);
  CHECK(!p.feasible);
  CHECK(!oracle::grid_pair_power(h, 1.0, 1.0, 2.0, true, 1e-4).feasible);
}

TEST_CASE("pair optimum: caps push the split along the face") {
  const PairEntropies h{kH1, kH1, kCondHalf, kCondHalf, kJointHalf};
  // Uncapped, node i would sit at about 2.04 bits; a cap of 3 holds it at exactly 2.
  const auto p = pair_power_optimum(h, 1.0, 0.8, 3.0, true);
  REQUIRE(p.feasible);
  CHECK(p.power_i == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(p.rate_i == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.power_j <= 3.0 + 1e-9);
  CHECK(std::abs(p.rate_i + p.rate_j - kJointHalf) < 1e-12);
  const auto grid = oracle::grid_pair_power(h, 1.0, 0.8, 3.0, true, 1e-5);
  CHECK(std::abs(grid.sum_power - p.sum_power()) < 1e-4);
}

TEST_CASE("pair optimum matches grid search on random triples") {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 60; ++t) {
    const double hi = 0.5 + 2.5 * u(rng), hj = 0.5 + 2.5 * u(rng);
    const double mi = std::min(hi, hj) * (0.05 + 1.1 * u(rng));
    const PairEntropies h{hi, hj, hi - mi, hj - mi, hi + hj - mi};
    const double gi = 0.2 * std::pow(100.0, u(rng)), gj = 0.2 * std::pow(100.0, u(rng));
    const double pmax = t % 3 == 0 ? kInfinity : 0.5 + 20.0 * u(rng);
    const bool clamp = t % 2 == 0;
    const auto p = pair_power_optimum(h, gi, gj, pmax, clamp);
    const auto grid = oracle::grid_pair_power(h, gi, gj, pmax, clamp, 1e-5);
    REQUIRE(p.feasible == grid.feasible);
    if (!p.feasible) continue;
    CHECK(std::abs(p.sum_power() - grid.sum_power) < 1e-4);
    CHECK(in_sw_region(h, p.rate_i, p.rate_j));
    CHECK(p.power_i <= pmax + 1e-9);
    CHECK(p.power_j <= pmax + 1e-9);
  }
}

TEST_CASE("pair optimum lies on the dominant face when caps are slack") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double hi = 1.0 + u(rng), hj = 1.0 + u(rng), mi = 0.8 * std::min(hi, hj) * u(rng);
    const PairEntropies h{hi, hj, hi - mi, hj - mi, hi + hj - mi};
    const auto p = pair_power_optimum(h, 0.3 + u(rng), 0.3 + u(rng), kInfinity, true);
    REQUIRE(p.feasible);
    CHECK(std::abs(p.rate_i + p.rate_j - h.h_ij) < 1e-12);
  }
}

TEST_CASE("noiseless: independent sources cost n H1") {
  const EntropyOracle o(Eigen::MatrixXd::Identity(5, 5));
  const auto a = optimal_noiseless_rates(o);
  CHECK(a.sum() == doctest::Approx(5.0 * kH1).epsilon(1e-14));
  CHECK(matching_rates_noiseless(o).sum() == doctest::Approx(5.0 * kH1).epsilon(1e-14));
}

TEST_CASE("noiseless: four-source example is a chain") {
  const EntropyOracle o(four_source_example());
  const auto a = optimal_noiseless_rates(o);
  const double chain = o.marginal(0) + o.conditional(2, 0) + o.conditional(1, 2) + o.conditional(3, 1);
  CHECK(std::abs(a.sum() - chain) < 1e-12);
  CHECK(a.witness.size() == 4);
  CHECK(a.method == "optimal");
}

TEST_CASE("noiseless optimum equals the minimum over roots of exhaustive search") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const EntropyOracle o(generate_network(5, seed % 2 ? 1.0 : 5.0, seed));
    const auto total = build_total_digraph(o);
    double best = kInfinity;
    for (int root = 0; root < 5; ++root) {
      const auto g = rooted_variant(total, root);
      best = std::min(best, brute_force_enumerate(g, EnumerationKind::arborescence, g.star_of(root)).best_weight);
    }
    const auto a = optimal_noiseless_rates(o);
    CHECK(std::abs(a.sum() - best) < 1e-12);
    // Rates come from the witness: root at its marginal, others conditional on their parent.
    for (const auto& e : a.witness) {
      const double expect = e.tail >= 5 ? o.marginal(e.head) : o.conditional(e.head, e.tail);
      CHECK(a.rates[static_cast<std::size_t>(e.head)] == expect);
    }
  }
}

TEST_CASE("rooted arborescence totals agree under equal variances") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const EntropyOracle o(generate_network(9, 1.0, seed));
    const auto w = rooted_arborescence_weights(o);
    const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    CHECK(*hi - *lo < 1e-9);
  }
}

TEST_CASE("noiseless matching baseline") {
  const EntropyOracle two(oracle::instance_at({{0.2, 0.5}, {0.7, 0.5}}, 1.0));
  const auto m2 = matching_rates_noiseless(two);
  CHECK(m2.sum() == doctest::Approx(kJointHalf).epsilon(1e-13));
  CHECK(m2.rates[0] == doctest::Approx(kH1).epsilon(1e-14));
  CHECK(m2.rates[1] == doctest::Approx(kCondHalf).epsilon(1e-13));

  const EntropyOracle three(oracle::instance_at({{0.1, 0.1}, {0.9, 0.9}, {0.2, 0.15}}, 1.0));
  double best = kInfinity;
  for (auto [i, j, k] : {std::array{0, 1, 2}, std::array{0, 2, 1}, std::array{1, 2, 0}}) {
    best = std::min(best, three.joint(i, j) + three.marginal(k));
  }
  const auto m3 = matching_rates_noiseless(three);
  CHECK(std::abs(m3.sum() - best) < 1e-12);
  CHECK(m3.rates[1] == three.marginal(1));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const EntropyOracle o(generate_network(4, 1.0, seed));
    CHECK(matching_rates_noiseless(o).sum() >= optimal_noiseless_rates(o).sum() - 1e-9);
  }
}

TEST_CASE("individual baselines") {
  const EntropyOracle o(generate_network(20, 1.0, 4));
  CHECK(individual_rates(o).sum() == doctest::Approx(40.94191170361282).epsilon(1e-13));
  CHECK(std::abs(individual_rates(o).sum() - 40.94) < 0.005);

  const EntropyOracle one(Eigen::MatrixXd::Identity(1, 1));
  CHECK(individual_rates(one).sum() == doctest::Approx(kH1).epsilon(1e-14));

  const auto inst = generate_network(16, 1.0, 6);
  const EntropyOracle o16(inst);
  const ChannelModel ch(inst.gains, 10.0);
  const auto p = individual_powers(o16, ch);
  double expect = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double q = (std::pow(2.0, kH1) - 1.0) / inst.gains[static_cast<std::size_t>(i)];
    CHECK(p.powers[static_cast<std::size_t>(i)] == doctest::Approx(q).epsilon(1e-13));
    expect += q;
  }
  CHECK(p.sum() == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("noisy matching baseline") {
  const auto inst2 = oracle::instance_at({{0.2, 0.5}, {0.7, 0.5}}, 1.0);
  const EntropyOracle o2(inst2);
  const ChannelModel c2(inst2.gains, 10.0);
  const auto pair = per_pair_power_optimum(o2, c2, 0, 1, true);
  const auto m2 = matching_allocation_noisy(o2, c2);
  CHECK(m2.sum() == doctest::Approx(pair.sum_power()).epsilon(1e-14));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = generate_network(4, 1.0, seed);
    const EntropyOracle o(inst);
    const ChannelModel ch(inst.gains, kInfinity);
    double best = kInfinity;
    for (auto [a, b, c, d] : {std::array{0, 1, 2, 3}, std::array{0, 2, 1, 3}, std::array{0, 3, 1, 2}}) {
      best = std::min(best, per_pair_power_optimum(o, ch, a, b, true).sum_power() +
                                per_pair_power_optimum(o, ch, c, d, true).sum_power());
    }
    // Singles are allowed too, but a pair never costs more than its two singles.
    CHECK(std::abs(matching_allocation_noisy(o, ch).sum() - best) < 1e-9);
  }
}

TEST_CASE("noisy optimum equals exhaustive search over strict matching forests") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto inst = generate_network(2 + static_cast<int>(seed % 5), 1.0, seed);
    const EntropyOracle o(inst);
    const ChannelModel ch(inst.gains, seed % 2 ? kInfinity : 10.0);
    const auto g = build_mixed_total_graph(o, ch, make_pair_optimizer(o, ch, true), true);
    const auto e = brute_force_enumerate(g, EnumerationKind::strict_matching_forest);
    if (!e.found()) {
      CHECK_THROWS_AS(optimal_noisy_allocation(o, ch), InfeasibleError);
      continue;
    }
    const auto a = optimal_noisy_allocation(o, ch);
    CHECK(a.exact);
    CHECK(std::abs(a.sum() - e.best_weight) < 1e-9);
    for (int i = 0; i < o.size(); ++i) {
      CHECK(a.powers[static_cast<std::size_t>(i)] ==
            doctest::Approx(ch.power_surrogate(i, effective_rate(a.rates[static_cast<std::size_t>(i)], true))).epsilon(1e-12));
    }
  }
}

TEST_CASE("noisy optimum raises InfeasibleError under a tiny cap") {
  const auto inst = generate_network(4, 1.0, 2);
  const EntropyOracle o(inst);
  const ChannelModel ch(inst.gains, 1e-6);
  CHECK_THROWS_AS(optimal_noisy_allocation(o, ch), InfeasibleError);
  CHECK_THROWS_AS(matching_allocation_noisy(o, ch), InfeasibleError);
  CHECK_THROWS_AS(sw_n_power_oracle(o, ch), InfeasibleError);
  CHECK(!individual_powers(o, ch).feasible);
}

TEST_CASE("sw oracle: one and two sources") {
  const EntropyOracle one(Eigen::MatrixXd::Identity(1, 1));
  const ChannelModel c1({2.0});
  const auto a1 = sw_n_power_oracle(one, c1);
  CHECK(a1.rates[0] == doctest::Approx(kH1).epsilon(1e-12));
  CHECK(a1.sum() == doctest::Approx((std::pow(2.0, kH1) - 1.0) / 2.0).epsilon(1e-12));

  const auto inst = oracle::instance_at({{0.2, 0.5}, {0.5, 0.2}}, 1.0);
  const EntropyOracle o(inst);
  const ChannelModel ch(inst.gains, 10.0);
  CHECK(inst.gains[0] == inst.gains[1]);
  const auto pair = per_pair_power_optimum(o, ch, 0, 1, true);
  CHECK(sw_n_power_oracle(o, ch).sum() == doctest::Approx(pair.sum_power()).epsilon(1e-9));
}

TEST_CASE("sw oracle: three sources against grid search") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto inst = generate_network(3, seed % 2 ? 1.0 : 5.0, seed);
    const EntropyOracle o(inst);
    const ChannelModel ch(inst.gains, 10.0);
    const auto grid = oracle::grid_sw3_power(set_function(o), {inst.gains[0], inst.gains[1], inst.gains[2]},
                                             10.0, true, 1e-3);
    if (!grid.feasible) {
      CHECK_THROWS_AS(sw_n_power_oracle(o, ch), InfeasibleError);
      continue;
    }
    const auto a = sw_n_power_oracle(o, ch);
    CHECK(std::abs(a.sum() - grid.sum_power) < 1e-3);
    CHECK(a.sum() <= grid.sum_power + 1e-9);
  }
}

TEST_CASE("sw oracle refuses large instances") {
  const auto inst = generate_network(13, 1.0, 1);
  const EntropyOracle o(inst);
  const ChannelModel ch(inst.gains, 10.0);
  CHECK_THROWS_AS(sw_n_power_oracle(o, ch), std::invalid_argument);
}

TEST_CASE("noisy sandwich on seeded instances") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = generate_network(6, seed % 2 ? 1.0 : 5.0, seed);
    const EntropyOracle o(inst);
    const ChannelModel ch(inst.gains, 10.0);
    double smf = 0.0, sw = 0.0;
    try {
      smf = optimal_noisy_allocation(o, ch).sum();
      sw = sw_n_power_oracle(o, ch).sum();
    } catch (const InfeasibleError&) {
      continue;
    }
    const double matching = matching_allocation_noisy(o, ch).sum();
    const double individual = individual_powers(o, ch).sum();
    CHECK(sw <= smf + 1e-6);
    CHECK(smf <= matching + 1e-6);
    CHECK(matching <= individual + 1e-6);
  }
}

TEST_CASE("unclamped mode carries negative surrogate powers") {
  // Two sensors almost on top of each other near the sink, gains 4:1. The joint split
  // wants a negative rate at the weaker node.
  const auto inst = oracle::instance_at({{0.01, 0.0}, {0.02, 0.0}}, 1.0);
  const EntropyOracle o(inst);
  REQUIRE(o.conditional(1, 0) < 0.0);
  const ChannelModel ch(inst.gains);
  NoisyOptions raw;
  raw.clamp_at_zero = false;
  const auto a = optimal_noisy_allocation(o, ch, raw);
  const auto b = optimal_noisy_allocation(o, ch);
  CHECK(a.sum() < b.sum());
  CHECK(*std::min_element(b.powers.begin(), b.powers.end()) >= 0.0);
}
