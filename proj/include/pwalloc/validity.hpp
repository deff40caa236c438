// Pairwise and generalized pairwise validity of rate assignments, with the
// decode schedules that witness them.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pwalloc/graphs.hpp"

namespace pwalloc {

enum class StepKind { solo, joint, conditional };

/// solo(node); joint(node, other); conditional(node | other).
struct DecodeStep {
  StepKind kind = StepKind::solo;
  int node = 0;
  int other = -1;

  friend bool operator==(const DecodeStep&, const DecodeStep&) = default;
};

using DecodeSchedule = std::vector<DecodeStep>;

struct ValidityReport {
  bool valid = false;
  DecodeSchedule schedule;           ///< complete only when valid
  std::optional<int> counterexample;  ///< lowest failing node when invalid
};

/// Reachability in G(R) from the parent set. Roots decode solo in index
/// order, then a breadth-first forest adds conditional steps.
ValidityReport check_pairwise_valid(std::span<const double> rates, const EntropyOracle& oracle);

/// Reachability in G_M(R) from initially decodable sources (starred or
/// undirected-incident), plus Q_i(R_i) <= P_max at every node.
ValidityReport check_generalized_valid(std::span<const double> rates, const EntropyOracle& oracle,
                                       const ChannelModel& channel, bool clamp_at_zero = true);

/// Replays a schedule. Throws std::invalid_argument for malformed input:
/// unknown nodes, a node decoded twice, a conditional step whose side
/// information is not decoded yet, or a joint step on a single node.
bool simulate_decode(const DecodeSchedule& schedule, std::span<const double> rates,
                     const EntropyOracle& oracle);

}  // namespace pwalloc
