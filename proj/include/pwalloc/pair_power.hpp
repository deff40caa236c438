// Optimal rate/power split for one jointly decoded pair of sources.

#pragma once

#include "pwalloc/model.hpp"

namespace pwalloc {

struct PairOptimum {
  double rate_i = 0.0;
  double rate_j = 0.0;
  double power_i = 0.0;
  double power_j = 0.0;
  bool feasible = false;

  double sum_power() const { return power_i + power_j; }
};

/// Minimizes Q_i(R_i) + Q_j(R_j) over the two-source Slepian-Wolf region
/// intersected with R_i <= C_i(P_max), R_j <= C_j(P_max), and R >= 0 when
/// `clamp_at_zero` is set.
///
/// On the dominant face R_i + R_j = H(X_i, X_j) the stationary point is
/// R_i = H/2 + log2(gamma_i / gamma_j) / 2. It is clamped first into the
/// Slepian-Wolf corners, then into the interval where both peak power caps
/// hold. The result is infeasible when that interval is empty.
PairOptimum pair_power_optimum(const PairEntropies& h, double gain_i, double gain_j,
                               double peak_power, bool clamp_at_zero);

PairOptimum per_pair_power_optimum(const EntropyOracle& oracle, const ChannelModel& channel, int i,
                                   int j, bool clamp_at_zero);

}  // namespace pwalloc
