#pragma once

// Seeded simulation of correlated Brownian paths. Wealth of a constant
// rebalancing rule is never time-stepped: it is read off the exact solution
//   log V_t(b) = mean_rate(b) t + sum_i b_i sigma_i W_i(t),
// so every grid time carries the exact continuous-time law.

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "kellygame/market.hpp"

namespace kelly {

struct SimConfig {
  double horizon = 1.0;
  std::int64_t steps = 1;
  std::int64_t paths = 1;
  std::uint64_t seed = 0;
  /// 0 = std::thread::hardware_concurrency(). Results do not depend on it.
  unsigned threads = 0;

  double dt() const { return horizon / static_cast<double>(steps); }
  void validate() const;
};

/// Monte Carlo mean with its standard error.
struct Estimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Sample mean and standard error (n - 1 denominator) of `values`, summed in
/// index order with Neumaier compensation.
Estimate mean_estimate(const Eigen::Ref<const Eigen::VectorXd>& values, std::uint64_t seed);

class PathBatch {
 public:
  using Increments = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  PathBatch(SimConfig config, Eigen::Index dimension, Eigen::VectorXd times, Increments increments);

  const SimConfig& config() const { return config_; }
  Eigen::Index dimension() const { return dimension_; }
  Eigen::Index paths() const { return increments_.rows(); }
  Eigen::Index steps() const { return times_.size() - 1; }
  const Eigen::VectorXd& times() const { return times_; }

  /// Index k with times()[k] == t (to 1e-9 relative to the horizon).
  Eigen::Index grid_index(double t) const;

  /// Delta W of `path` over step `step`, an n-vector.
  Eigen::Map<const Eigen::VectorXd> increment(Eigen::Index path, Eigen::Index step) const {
    return Eigen::Map<const Eigen::VectorXd>(increments_.row(path).data() + step * dimension_, dimension_);
  }

  /// W(times()[k]) for every path, paths x n.
  Eigen::MatrixXd brownian_levels(Eigen::Index k) const;

  /// log V_t(b) per path.
  Eigen::VectorXd log_wealth(const Market& m, const Rule& b, double t) const;

  /// log(V_t(b) / V_t(c)) per path, both rules on the same increments.
  Eigen::VectorXd log_ratio(const Market& m, const Rule& b, const Rule& c, double t) const;

 private:
  void require_market(const Market& m) const;

  SimConfig config_;
  Eigen::Index dimension_;
  Eigen::VectorXd times_;
  Increments increments_;
};

/// Increments Delta W = L z sqrt(dt) with L L' = rho and z drawn from the
/// Philox stream of (seed, path, step, asset).
PathBatch simulate_paths(const Market& m, const SimConfig& cfg);

/// Sample mean of V_t(b) / V_t(c).
Estimate estimate_expected_ratio(const PathBatch& batch, const Market& m, const Rule& b, const Rule& c, double t);

/// Fraction of paths with V_t(b) >= V_t(c), binomial standard error.
Estimate estimate_win_probability(const PathBatch& batch, const Market& m, const Rule& b, const Rule& c, double t);

struct TrajectoryRow {
  double t;
  double v1;
  double v2;
  double ratio;
  double log_v1;
  double log_v2;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;

  /// Header t,v1,v2,ratio; 17 significant digits.
  void write_csv(std::ostream& os) const;
};

/// One play of the game on a single simulated path (cfg.paths must be 1).
Trajectory sample_play(const Market& m, const Rule& b, const Rule& c, const SimConfig& cfg);

}  // namespace kelly
