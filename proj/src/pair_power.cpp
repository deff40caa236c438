#include "pwalloc/pair_power.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pwalloc {

namespace {

double q(double rate, double gain) { return std::expm1(rate * std::numbers::ln2) / gain; }

double cap_rate(double gain, double peak_power) {
  if (std::isinf(peak_power)) return kInfinity;
  return std::log1p(gain * peak_power) / std::numbers::ln2;
}

}  // namespace

PairOptimum pair_power_optimum(const PairEntropies& h, double gain_i, double gain_j,
                               double peak_power, bool clamp_at_zero) {
  const double floor_i = clamp_at_zero ? std::max(h.h_i_given_j, 0.0) : h.h_i_given_j;
  const double floor_j = clamp_at_zero ? std::max(h.h_j_given_i, 0.0) : h.h_j_given_i;
  const double cap_i = cap_rate(gain_i, peak_power);
  const double cap_j = cap_rate(gain_j, peak_power);
  const double total = h.h_ij;

  PairOptimum out;
  if (floor_i + floor_j >= total) {
    // The floors already cover the joint entropy; the face is not binding.
    out.rate_i = floor_i;
    out.rate_j = floor_j;
  } else {
    double r = 0.5 * total + 0.5 * std::log2(gain_i / gain_j);
    r = std::clamp(r, floor_i, total - floor_j);
    const double lo = std::max(floor_i, total - cap_j);
    const double hi = std::min(total - floor_j, cap_i);
    if (lo > hi) return out;
    r = std::clamp(r, lo, hi);
    out.rate_i = r;
    out.rate_j = total - r;
  }
  if (out.rate_i > cap_i || out.rate_j > cap_j) return PairOptimum{};
  out.power_i = q(out.rate_i, gain_i);
  out.power_j = q(out.rate_j, gain_j);
  out.feasible = true;
  return out;
}

PairOptimum per_pair_power_optimum(const EntropyOracle& oracle, const ChannelModel& channel, int i,
                                   int j, bool clamp_at_zero) {
  if (i == j) throw std::invalid_argument("per_pair_power_optimum: nodes must differ");
  return pair_power_optimum(oracle.pair(i, j), channel.gain(i), channel.gain(j),
                            channel.peak_power(), clamp_at_zero);
}

}  // namespace pwalloc
