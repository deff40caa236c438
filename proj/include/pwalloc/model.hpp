// Network instances, Gaussian source entropies and AWGN channel quantities.
//
// All entropies and capacities are in bits. Sources are jointly Gaussian with
// covariance K_ij = sigma^2 * exp(-c * d_ij), so every quantity below is a
// closed form in K.

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pwalloc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

/// Name of the position generator; bumped whenever its output would change.
inline constexpr std::string_view kGeneratorName = "mt19937_64/u53/v1";

struct NetworkInstance {
  std::vector<Point> positions;
  Point sink{};
  double correlation = 1.0;  ///< c in exp(-c d)
  double variance = 1.0;     ///< sigma^2
  std::vector<double> gains;
  std::uint64_t seed = 0;
  /// Number of coordinates redrawn because they coincided with the sink.
  int resample_count = 0;

  int size() const { return static_cast<int>(positions.size()); }
};

/// Draws n i.i.d. uniform sensor positions in [0,1]^2 and sets each gain to
/// 1 / d(i, sink)^2. Throws std::invalid_argument for n < 2 or c <= 0.
NetworkInstance generate_network(int n, double c, std::uint64_t seed, Point sink = {},
                                 double variance = 1.0);

/// Checks the instance invariants (positions in the unit square, positive
/// gains/c/sigma^2, matching lengths). Throws std::invalid_argument.
void validate(const NetworkInstance& instance);

/// Per-instance stream seed for replication `index` of a sweep.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return master ^ index;
}

Eigen::MatrixXd covariance_matrix(const NetworkInstance& instance);

/// Raised when a correlation coefficient reaches 1 or K is not positive definite.
class DegenerateCorrelation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PairEntropies {
  double h_i = 0.0;
  double h_j = 0.0;
  double h_i_given_j = 0.0;
  double h_j_given_i = 0.0;
  double h_ij = 0.0;
};

/// Differential entropies of a jointly Gaussian vector. Conditional values
/// may be negative for strongly correlated pairs.
class EntropyOracle {
 public:
  explicit EntropyOracle(const NetworkInstance& instance);
  explicit EntropyOracle(Eigen::MatrixXd covariance);

  int size() const { return n_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }

  double marginal(int i) const;
  /// H(X_i | X_j)
  double conditional(int i, int j) const;
  double joint(int i, int j) const;
  PairEntropies pair(int i, int j) const;

  /// H(X_S) for the subset encoded in `mask` (bit i = node i); H(empty) = 0.
  double joint_entropy(std::uint64_t mask) const;
  /// H(X_1, ..., X_n)
  double joint_all() const;
  /// H(X_S | X_{S^c}).
  double subset_conditional(std::uint64_t mask) const;
  double subset_conditional(std::span<const int> subset) const;

 private:
  void check_index(int i) const;

  int n_ = 0;
  Eigen::MatrixXd covariance_;
  std::vector<double> marginal_;
  std::vector<double> conditional_;  // row-major n x n, H(X_i | X_j) at i*n+j
  double log_det_all_ = 0.0;
};

/// Gaussian entropy (bits) of a d-dimensional vector whose covariance has
/// natural-log determinant `log_det`.
double gaussian_entropy_bits(int dimension, double log_det);

/// Orthogonal AWGN links with unit noise power: C_i(P) = log2(1 + gamma_i P).
class ChannelModel {
 public:
  explicit ChannelModel(std::vector<double> gains, double peak_power = kInfinity);

  int size() const { return static_cast<int>(gains_.size()); }
  double gain(int i) const { return gains_.at(static_cast<std::size_t>(i)); }
  const std::vector<double>& gains() const { return gains_; }
  double peak_power() const { return peak_power_; }

  double capacity(int i, double power) const;
  /// Q_i(R) = (2^R - 1) / gamma_i. Throws std::invalid_argument for R < 0.
  double power_for_rate(int i, double rate) const;
  /// Same formula without the domain check; negative rates give negative
  /// "power" surrogates.
  double power_surrogate(int i, double rate) const;
  /// C_i(P_max); +inf when the peak power is unbounded.
  double max_rate(int i) const;

 private:
  std::vector<double> gains_;
  double peak_power_ = kInfinity;
};

/// Rate actually fed into Q under the chosen clamp policy.
constexpr double effective_rate(double rate, bool clamp_at_zero) {
  return (clamp_at_zero && rate < 0.0) ? 0.0 : rate;
}

}  // namespace pwalloc
