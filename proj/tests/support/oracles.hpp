// Independent reference computations for the test suites. Nothing here calls
// the solver or allocation code it is used to check.

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "pwalloc/graphs.hpp"

namespace oracle {

/// Gaussian entropies of a pair with unit-free variances, straight from the
/// 2x2 closed forms (no matrix library).
struct PairClosedForm {
  double h_i, h_j, h_i_given_j, h_j_given_i, h_ij;
};
PairClosedForm gaussian_pair(double var_i, double var_j, double cov);

struct GridResult {
  bool feasible = false;
  double sum_power = 0.0;
  double rate_i = 0.0;
  double rate_j = 0.0;
};

/// Minimum Q_i + Q_j over a rate grid of step `step` on R_i (endpoints and
/// cap/corner breakpoints included); R_j is the smallest rate the two-source
/// region allows for that R_i.
GridResult grid_pair_power(const pwalloc::PairEntropies& h, double gain_i, double gain_j,
                           double peak_power, bool clamp, double step);

/// Three-source region given by its lower set function g over masks 0..7
/// (g[S] = H(X_S | X_{S^c})). Grid over (R_1, R_2) at `step`, followed by a
/// fine local search around the best grid point; R_3 takes its smallest
/// admissible value.
GridResult grid_sw3_power(const std::array<double, 8>& g, const std::array<double, 3>& gains,
                          double peak_power, bool clamp, double step);

/// Exhaustive search over decode orders (memoized on the decoded set).
/// Pairwise: solo and conditional steps. Generalized: also joint steps and
/// Q_i(R_i) <= P_max.
bool schedule_exists(const std::vector<double>& rates, const pwalloc::EntropyOracle& oracle);
bool generalized_schedule_exists(const std::vector<double>& rates,
                                 const pwalloc::EntropyOracle& oracle,
                                 const pwalloc::ChannelModel& channel, bool clamp);

/// Random digraph on regular nodes 0..n-1 (no starred nodes present).
pwalloc::MixedGraph random_digraph(int n, double density, std::mt19937_64& rng);

/// Random mixed graph: starred, directed and undirected edges each present
/// with the given probability, weights uniform in [lo, hi].
pwalloc::MixedGraph random_mixed_graph(int n, double p_star, double p_dir, double p_undir,
                                       double lo, double hi, std::mt19937_64& rng);

/// Minimum over all in-edge choices that reach the root (independent of the
/// library enumerator). +inf when no arborescence exists.
double brute_arborescence(const pwalloc::MixedGraph& g, int root);

/// Tiny instance at explicit positions, gains 1/d^2.
pwalloc::NetworkInstance instance_at(const std::vector<pwalloc::Point>& positions, double c);

}  // namespace oracle
