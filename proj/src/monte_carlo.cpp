#include "kellygame/monte_carlo.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "kellygame/analytics.hpp"
#include "kellygame/format.hpp"
#include "kellygame/parallel.hpp"
#include "kellygame/philox.hpp"

namespace kelly {

void SimConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(Errc::invalid_argument, "horizon must be > 0");
  if (steps < 1) throw Error(Errc::invalid_argument, "steps must be >= 1");
  if (paths < 1) throw Error(Errc::invalid_argument, "paths must be >= 1");
  if (!(dt() > 0.0)) throw Error(Errc::invalid_argument, "time step underflows");
}

Estimate mean_estimate(const Eigen::Ref<const Eigen::VectorXd>& values, std::uint64_t seed) {
  const Eigen::Index n = values.size();
  if (n == 0) throw Error(Errc::invalid_argument, "empty sample");
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = values[i];
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  const double mean = (sum + comp) / static_cast<double>(n);
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = values[i] - mean;
    ss += d * d;
  }
  const double se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return {mean, se, static_cast<std::size_t>(n), seed};
}

PathBatch::PathBatch(SimConfig config, Eigen::Index dimension, Eigen::VectorXd times, Increments increments)
    : config_(config), dimension_(dimension), times_(std::move(times)), increments_(std::move(increments)) {}

Eigen::Index PathBatch::grid_index(double t) const {
  const double dt = config_.dt();
  const double k = std::round(t / dt);
  const double slack = 1e-9 * std::max(1.0, config_.horizon);
  if (!std::isfinite(t) || k < 0 || k > static_cast<double>(steps()) || std::abs(t - k * dt) > slack) {
    throw Error(Errc::time_off_grid, "t = " + format_g17(t) + " is not a multiple of dt = " + format_g17(dt) +
                                         " within [0, " + format_g17(config_.horizon) + "]");
  }
  return static_cast<Eigen::Index>(k);
}

Eigen::MatrixXd PathBatch::brownian_levels(Eigen::Index k) const {
  Eigen::MatrixXd levels = Eigen::MatrixXd::Zero(paths(), dimension_);
  for (Eigen::Index p = 0; p < paths(); ++p) {
    for (Eigen::Index s = 0; s < k; ++s) levels.row(p) += increment(p, s).transpose();
  }
  return levels;
}

void PathBatch::require_market(const Market& m) const {
  if (m.dimension() != dimension_) {
    throw Error(Errc::dimension_mismatch, "path batch was simulated for a different number of stocks");
  }
}

Eigen::VectorXd PathBatch::log_wealth(const Market& m, const Rule& b, double t) const {
  require_market(m);
  const Eigen::Index k = grid_index(t);
  const double tk = times_[k];
  const LogWealthLaw<double> law = log_wealth_law(m, b);
  const Eigen::VectorXd exposure = b.weights.cwiseProduct(m.volatility());
  return (brownian_levels(k) * exposure).array() + law.mean(tk);
}

Eigen::VectorXd PathBatch::log_ratio(const Market& m, const Rule& b, const Rule& c, double t) const {
  require_market(m);
  const Eigen::Index k = grid_index(t);
  const double tk = times_[k];
  const LogWealthLaw<double> law = log_ratio_law(m, b, c);
  const Eigen::VectorXd exposure = (b.weights - c.weights).cwiseProduct(m.volatility());
  return (brownian_levels(k) * exposure).array() + law.mean(tk);
}

PathBatch simulate_paths(const Market& m, const SimConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = m.dimension();
  const Eigen::Index steps = cfg.steps;
  const Eigen::Index pairs = (n + 1) / 2;
  const double scale = std::sqrt(cfg.dt());
  const Eigen::MatrixXd factor = m.correlation_factor() * scale;
  const Philox4x32 rng(cfg.seed);

  PathBatch::Increments inc(cfg.paths, steps * n);
  detail::parallel_for(cfg.paths, cfg.threads, [&](std::int64_t begin, std::int64_t end) {
    Eigen::VectorXd z(2 * pairs);
    for (std::int64_t p = begin; p < end; ++p) {
      const std::uint64_t stream = stream_id(StreamDomain::brownian, static_cast<std::uint64_t>(p));
      for (Eigen::Index s = 0; s < steps; ++s) {
        for (Eigen::Index j = 0; j < pairs; ++j) {
          const auto [z0, z1] = normal_pair(rng(stream, static_cast<std::uint64_t>(s * pairs + j)));
          z[2 * j] = z0;
          z[2 * j + 1] = z1;
        }
        inc.row(p).segment(s * n, n) = (factor * z.head(n)).transpose();
      }
    }
  });

  Eigen::VectorXd times(steps + 1);
  for (Eigen::Index k = 0; k <= steps; ++k) times[k] = cfg.dt() * static_cast<double>(k);
  times[steps] = cfg.horizon;
  return PathBatch(cfg, n, std::move(times), std::move(inc));
}

Estimate estimate_expected_ratio(const PathBatch& batch, const Market& m, const Rule& b, const Rule& c, double t) {
  const Eigen::VectorXd ratio = batch.log_ratio(m, b, c, t).array().exp();
  return mean_estimate(ratio, batch.config().seed);
}

Estimate estimate_win_probability(const PathBatch& batch, const Market& m, const Rule& b, const Rule& c, double t) {
  const Eigen::VectorXd lr = batch.log_ratio(m, b, c, t);
  const auto wins = (lr.array() >= 0.0).count();
  const double n = static_cast<double>(lr.size());
  const double p = static_cast<double>(wins) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), static_cast<std::size_t>(lr.size()), batch.config().seed};
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "t,v1,v2,ratio\n";
  for (const auto& r : rows) {
    os << format_g17(r.t) << ',' << format_g17(r.v1) << ',' << format_g17(r.v2) << ',' << format_g17(r.ratio)
       << '\n';
  }
}

Trajectory sample_play(const Market& m, const Rule& b, const Rule& c, const SimConfig& cfg) {
  if (cfg.paths != 1) throw Error(Errc::invalid_argument, "sample_play simulates exactly one path");
  m.require_dimension(b, "rule b");
  m.require_dimension(c, "rule c");
  const PathBatch batch = simulate_paths(m, cfg);
  const LogWealthLaw<double> law_b = log_wealth_law(m, b);
  const LogWealthLaw<double> law_c = log_wealth_law(m, c);
  const LogWealthLaw<double> law_ratio = log_ratio_law(m, b, c);
  const Eigen::VectorXd exp_b = b.weights.cwiseProduct(m.volatility());
  const Eigen::VectorXd exp_c = c.weights.cwiseProduct(m.volatility());

  Trajectory out;
  out.rows.reserve(static_cast<std::size_t>(batch.steps() + 1));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m.dimension());
  for (Eigen::Index k = 0; k <= batch.steps(); ++k) {
    if (k > 0) w += batch.increment(0, k - 1);
    const double t = batch.times()[k];
    const double lb = law_b.mean(t) + exp_b.dot(w);
    const double lc = law_c.mean(t) + exp_c.dot(w);
    const double lr = law_ratio.mean(t) + (exp_b - exp_c).dot(w);
    out.rows.push_back({t, std::exp(lb), std::exp(lc), std::exp(lr), lb, lc});
  }
  return out;
}

}  // namespace kelly
