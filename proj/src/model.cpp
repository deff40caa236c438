#include "pwalloc/model.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace pwalloc {

namespace {

// 53 high bits of the engine output mapped onto [0, 1). Avoids the
// implementation-defined std::uniform_real_distribution.
double unit_draw(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double log_det_of(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw DegenerateCorrelation("covariance submatrix is not positive definite");
  }
  const auto& l = llt.matrixL();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < m.rows(); ++k) acc += std::log(l(k, k));
  return 2.0 * acc;
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

NetworkInstance generate_network(int n, double c, std::uint64_t seed, Point sink,
                                 double variance) {
  if (n < 2) throw std::invalid_argument("generate_network: need at least 2 nodes");
  if (!(c > 0.0)) throw std::invalid_argument("generate_network: correlation must be > 0");
  if (!(variance > 0.0)) throw std::invalid_argument("generate_network: variance must be > 0");

  NetworkInstance inst;
  inst.sink = sink;
  inst.correlation = c;
  inst.variance = variance;
  inst.seed = seed;
  inst.positions.reserve(static_cast<std::size_t>(n));
  inst.gains.reserve(static_cast<std::size_t>(n));

  std::mt19937_64 engine(seed);
  for (int i = 0; i < n; ++i) {
    Point p{unit_draw(engine), unit_draw(engine)};
    while (distance(p, sink) == 0.0) {
      ++inst.resample_count;
      p = Point{unit_draw(engine), unit_draw(engine)};
    }
    const double d = distance(p, sink);
    inst.positions.push_back(p);
    inst.gains.push_back(1.0 / (d * d));
  }
  return inst;
}

void validate(const NetworkInstance& instance) {
  const auto n = instance.positions.size();
  if (n == 0) throw std::invalid_argument("instance has no nodes");
  if (instance.gains.size() != n) throw std::invalid_argument("gains/positions length mismatch");
  if (!(instance.correlation > 0.0)) throw std::invalid_argument("correlation must be > 0");
  if (!(instance.variance > 0.0)) throw std::invalid_argument("variance must be > 0");
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = instance.positions[i];
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw std::invalid_argument("position " + std::to_string(i) + " outside [0,1]^2");
    }
    if (!(instance.gains[i] > 0.0) || !std::isfinite(instance.gains[i])) {
      throw std::invalid_argument("gain " + std::to_string(i) + " must be positive and finite");
    }
  }
}

Eigen::MatrixXd covariance_matrix(const NetworkInstance& instance) {
  const int n = instance.size();
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = instance.variance;
    for (int j = i + 1; j < n; ++j) {
      const double d = distance(instance.positions[static_cast<std::size_t>(i)],
                                instance.positions[static_cast<std::size_t>(j)]);
      const double v = instance.variance * std::exp(-instance.correlation * d);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

double gaussian_entropy_bits(int dimension, double log_det) {
  constexpr double kLog2PiE = 4.0941911703612822;  // log2(2 pi e)
  return 0.5 * (dimension * kLog2PiE + log_det / std::numbers::ln2);
}

EntropyOracle::EntropyOracle(const NetworkInstance& instance)
    : EntropyOracle(covariance_matrix(instance)) {}

EntropyOracle::EntropyOracle(Eigen::MatrixXd covariance) : covariance_(std::move(covariance)) {
  if (covariance_.rows() != covariance_.cols() || covariance_.rows() == 0) {
    throw std::invalid_argument("covariance must be a non-empty square matrix");
  }
  if (covariance_.rows() > 64) throw std::invalid_argument("at most 64 sources supported");
  n_ = static_cast<int>(covariance_.rows());
  if (!covariance_.isApprox(covariance_.transpose(), 1e-12)) {
    throw std::invalid_argument("covariance must be symmetric");
  }

  marginal_.resize(static_cast<std::size_t>(n_));
  conditional_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    const double kii = covariance_(i, i);
    if (!(kii > 0.0)) throw DegenerateCorrelation("non-positive variance");
    marginal_[static_cast<std::size_t>(i)] = gaussian_entropy_bits(1, std::log(kii));
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      const double rho = covariance_(i, j) / std::sqrt(covariance_(i, i) * covariance_(j, j));
      if (!(std::abs(rho) < 1.0)) {
        throw DegenerateCorrelation("|rho| >= 1 between nodes " + std::to_string(i) + " and " +
                                    std::to_string(j));
      }
      conditional_[static_cast<std::size_t>(i * n_ + j)] =
          gaussian_entropy_bits(1, std::log(covariance_(i, i)) + std::log1p(-rho * rho));
    }
  }
  log_det_all_ = log_det_of(covariance_);
}

void EntropyOracle::check_index(int i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("node index out of range");
}

double EntropyOracle::marginal(int i) const {
  check_index(i);
  return marginal_[static_cast<std::size_t>(i)];
}

double EntropyOracle::conditional(int i, int j) const {
  check_index(i);
  check_index(j);
  if (i == j) throw std::invalid_argument("conditional entropy needs distinct nodes");
  return conditional_[static_cast<std::size_t>(i * n_ + j)];
}

double EntropyOracle::joint(int i, int j) const { return marginal(j) + conditional(i, j); }

PairEntropies EntropyOracle::pair(int i, int j) const {
  PairEntropies p;
  p.h_i = marginal(i);
  p.h_j = marginal(j);
  p.h_i_given_j = conditional(i, j);
  p.h_j_given_i = conditional(j, i);
  p.h_ij = p.h_j + p.h_i_given_j;
  return p;
}

double EntropyOracle::joint_entropy(std::uint64_t mask) const {
  if (n_ < 64 && (mask >> n_) != 0) throw std::invalid_argument("subset mask out of range");
  if (mask == 0) return 0.0;
  const int d = std::popcount(mask);
  if (d == n_) return gaussian_entropy_bits(n_, log_det_all_);
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < n_; ++i) {
    if ((mask >> i) & 1U) idx.push_back(i);
  }
  Eigen::MatrixXd sub(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) sub(a, b) = covariance_(idx[a], idx[b]);
  }
  return gaussian_entropy_bits(d, log_det_of(sub));
}

double EntropyOracle::joint_all() const { return gaussian_entropy_bits(n_, log_det_all_); }

double EntropyOracle::subset_conditional(std::uint64_t mask) const {
  if (mask == 0) throw std::invalid_argument("subset must be non-empty");
  const std::uint64_t all = n_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n_) - 1);
  if ((mask & ~all) != 0) throw std::invalid_argument("subset mask out of range");
  return joint_all() - joint_entropy(all & ~mask);
}

double EntropyOracle::subset_conditional(std::span<const int> subset) const {
  std::uint64_t mask = 0;
  for (int i : subset) {
    check_index(i);
    mask |= std::uint64_t{1} << i;
  }
  return subset_conditional(mask);
}

ChannelModel::ChannelModel(std::vector<double> gains, double peak_power)
    : gains_(std::move(gains)), peak_power_(peak_power) {
  for (double g : gains_) {
    if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("channel gains must be > 0");
  }
  if (!(peak_power > 0.0)) throw std::invalid_argument("peak power must be > 0");
}

double ChannelModel::capacity(int i, double power) const {
  return std::log1p(gain(i) * power) / std::numbers::ln2;
}

double ChannelModel::power_for_rate(int i, double rate) const {
  if (rate < 0.0) throw std::invalid_argument("power_for_rate: negative rate");
  return power_surrogate(i, rate);
}

double ChannelModel::power_surrogate(int i, double rate) const {
  return std::expm1(rate * std::numbers::ln2) / gain(i);
}

double ChannelModel::max_rate(int i) const {
  if (std::isinf(peak_power_)) return kInfinity;
  return capacity(i, peak_power_);
}

}  // namespace pwalloc
