// Rate and power assignments: noiseless and noisy optima, matching and
// individual baselines, and the n-source Slepian-Wolf power oracle.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pwalloc/graphs.hpp"
#include "pwalloc/solvers.hpp"

namespace pwalloc {

/// An edge of the witness subgraph, in graph node ids (i* = n + i).
struct WitnessEdge {
  int tail = 0;
  int head = 0;
  double weight = 0.0;
  EdgeKind kind = EdgeKind::directed;
};

std::vector<WitnessEdge> witness_edges(const MixedGraph& graph, const SubgraphSelection& selection);

struct RateAssignment {
  std::string method;
  std::vector<double> rates;
  std::vector<WitnessEdge> witness;

  double sum() const;
};

struct PowerAssignment {
  std::string method;
  std::vector<double> rates;
  std::vector<double> powers;
  std::vector<WitnessEdge> witness;
  bool exact = true;     ///< false when a solver stopped on its time budget
  bool feasible = true;  ///< every power within P_max

  double sum() const;
  double sum_rate() const;
};

/// No assignment of this method satisfies the peak power constraint.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The solver budget ran out before any strict matching forest was found.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NoisyOptions {
  bool clamp_at_zero = true;
  double budget_seconds = kInfinity;
};

/// Minimum arborescence weight of G_{i*} for every root i.
std::vector<double> rooted_arborescence_weights(const EntropyOracle& oracle);

/// Best root's minimum arborescence: the root sends H(X_i), every other node
/// its conditional entropy given its in-neighbour.
RateAssignment optimal_noiseless_rates(const EntropyOracle& oracle);

/// Minimum joint-entropy matching; the lower index of each pair sends its
/// marginal, the higher its conditional; an odd leftover sends its marginal.
RateAssignment matching_rates_noiseless(const EntropyOracle& oracle);

RateAssignment individual_rates(const EntropyOracle& oracle);

/// Minimum strict matching forest of the mixed total graph. Throws
/// InfeasibleError when none exists and BudgetExceeded when the budget ends
/// with nothing found.
PowerAssignment optimal_noisy_allocation(const EntropyOracle& oracle, const ChannelModel& channel,
                                         const NoisyOptions& options = {});

/// Minimum matching over per-pair optimal powers. Pairs infeasible under
/// P_max are left out; unmatched nodes send their marginal. Throws
/// InfeasibleError when no cover fits under P_max.
PowerAssignment matching_allocation_noisy(const EntropyOracle& oracle, const ChannelModel& channel,
                                          bool clamp_at_zero = true);

/// Everyone sends H(X_i). `feasible` reports whether P_max holds.
PowerAssignment individual_powers(const EntropyOracle& oracle, const ChannelModel& channel,
                                  bool clamp_at_zero = true);

inline constexpr int kSwOracleMaxNodes = 12;

/// Minimizes sum_i (2^{R_i} - 1) / gamma_i over the full Slepian-Wolf region
/// with R_i <= C_i(P_max) (and R_i >= 0 when clamping), by the decomposition
/// algorithm for separable convex objectives over a base polytope. Throws
/// InfeasibleError when the caps exclude the region and
/// std::invalid_argument above kSwOracleMaxNodes.
PowerAssignment sw_n_power_oracle(const EntropyOracle& oracle, const ChannelModel& channel,
                                  bool clamp_at_zero = true);

}  // namespace pwalloc
