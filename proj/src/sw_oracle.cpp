#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "pwalloc/allocation.hpp"

namespace pwalloc {

namespace {

using Mask = std::uint32_t;

// Separable convex minimization over the base polytope of a submodular
// function given as a table over subsets. Each step solves the problem with
// only the x(G) = F(G) constraint, then splits along the most violated set.
class Decomposition {
 public:
  Decomposition(const std::vector<double>& f, const std::vector<double>& log_gain)
      : f_(f), log_gain_(log_gain), x_(log_gain.size(), 0.0) {}

  std::vector<double> solve(Mask ground) {
    split(ground, 0);
    return x_;
  }

 private:
  double value(Mask t, Mask base) const { return f_[t | base] - f_[base]; }

  void split(Mask ground, Mask base) {
    if (ground == 0) return;
    const int k = std::popcount(ground);
    double log_sum = 0.0;
    for (Mask m = ground; m != 0; m &= m - 1) log_sum += log_gain_[std::countr_zero(m)];
    const double mu = (value(ground, base) - log_sum) / k;
    std::vector<double> relaxed(x_.size(), 0.0);
    for (Mask m = ground; m != 0; m &= m - 1) {
      const int i = std::countr_zero(m);
      relaxed[static_cast<std::size_t>(i)] = log_gain_[static_cast<std::size_t>(i)] + mu;
    }

    // Most violated set; among near-ties the largest one.
    Mask best_set = ground;
    double best = 0.0;
    const double tol = 1e-12 * std::max(1.0, std::abs(value(ground, base)));
    for (Mask t = (ground - 1) & ground;; t = (t - 1) & ground) {
      if (t != 0) {
        double xt = 0.0;
        for (Mask m = t; m != 0; m &= m - 1) xt += relaxed[static_cast<std::size_t>(std::countr_zero(m))];
        const double v = value(t, base) - xt;
        if (v < best - tol) {
          best = v;
          best_set = t;
        } else if (best < -tol && v <= best + tol && std::popcount(t) > std::popcount(best_set)) {
          best_set = t;
        }
      }
      if (t == 0) break;
    }

    if (best_set == ground) {
      for (Mask m = ground; m != 0; m &= m - 1) {
        const int i = std::countr_zero(m);
        x_[static_cast<std::size_t>(i)] = relaxed[static_cast<std::size_t>(i)];
      }
      return;
    }
    split(best_set, base);
    split(ground & ~best_set, base | best_set);
  }

  const std::vector<double>& f_;
  const std::vector<double>& log_gain_;
  std::vector<double> x_;
};

}  // namespace

PowerAssignment sw_n_power_oracle(const EntropyOracle& oracle, const ChannelModel& channel,
                                  bool clamp_at_zero) {
  const int n = oracle.size();
  if (n < 1) throw std::invalid_argument("sw_n_power_oracle: empty instance");
  if (n > kSwOracleMaxNodes) {
    throw std::invalid_argument("sw_n_power_oracle: refused above " +
                                std::to_string(kSwOracleMaxNodes) + " sources");
  }
  if (channel.size() != n) throw std::invalid_argument("channel/oracle size mismatch");

  const Mask full = (Mask{1} << n) - 1;
  const std::size_t states = std::size_t{full} + 1;

  // Supermodular lower constraints x(S) >= H(X_S | X_{S^c}).
  std::vector<double> g(states, 0.0);
  for (Mask s = 1; s <= full; ++s) g[s] = oracle.subset_conditional(s);
  if (clamp_at_zero) {
    // Fold in x >= 0: g(S) = max over T in S of g(T).
    for (Mask s = 1; s <= full; ++s) {
      for (Mask m = s; m != 0; m &= m - 1) g[s] = std::max(g[s], g[s & ~(m & -m)]);
    }
  }

  // Dual submodular function, then fold in the caps x_i <= C_i(P_max).
  std::vector<double> f(states, 0.0);
  for (Mask s = 0; s <= full; ++s) f[s] = g[full] - g[full & ~s];
  std::vector<double> capped(f);
  for (Mask s = 1; s <= full; ++s) {
    for (Mask m = s; m != 0; m &= m - 1) {
      const int i = std::countr_zero(m);
      capped[s] = std::min(capped[s], capped[s & ~(Mask{1} << i)] + channel.max_rate(i));
    }
  }
  if (capped[full] < f[full] - 1e-9 * std::max(1.0, std::abs(f[full]))) {
    throw InfeasibleError("Slepian-Wolf region lies outside the peak power caps");
  }
  capped[full] = f[full];

  std::vector<double> log_gain(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) log_gain[static_cast<std::size_t>(i)] = std::log2(channel.gain(i));

  PowerAssignment out;
  out.method = "sw_oracle";
  out.rates = Decomposition(capped, log_gain).solve(full);
  if (clamp_at_zero) {
    for (auto& r : out.rates) r = std::max(r, 0.0);
  }
  out.powers.resize(out.rates.size());
  out.feasible = true;
  for (int i = 0; i < n; ++i) {
    out.powers[static_cast<std::size_t>(i)] =
        channel.power_surrogate(i, out.rates[static_cast<std::size_t>(i)]);
    if (out.powers[static_cast<std::size_t>(i)] > channel.peak_power() + kPowerSlack) {
      out.feasible = false;
    }
  }
  return out;
}

}  // namespace pwalloc
