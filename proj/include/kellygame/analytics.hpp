#pragma once

// Closed forms for constant rebalancing rules. With b held continuously,
//   log V_t(b) ~ Normal(mean_rate t, variance_rate t),
//   mean_rate = r + (mu - r1)'b - b'Sigma b / 2,  variance_rate = b'Sigma b,
// and the wealth ratio of two rules driven by the same Brownian motion is
// again lognormal. Nothing in this header simulates.

#include <cmath>
#include <numbers>

#include "kellygame/market.hpp"

namespace kelly {

template <typename Scalar>
struct LogWealthLaw {
  Scalar mean_rate;
  Scalar variance_rate;

  Scalar mean(Scalar t) const { return mean_rate * t; }
  Scalar variance(Scalar t) const { return variance_rate * t; }
  Scalar stddev(Scalar t) const { return std::sqrt(variance_rate * t); }
  /// E[exp(X)] for X with this law at time t.
  Scalar expected_exp(Scalar t) const { return std::exp((mean_rate + variance_rate / Scalar(2)) * t); }
};

/// Exponential growth rate of E[V_t(b) / V_t(c)].
template <typename Scalar>
struct PayoffValue {
  Scalar kernel;

  Scalar ratio_at(Scalar t) const { return std::exp(kernel * t); }
};

/// Standard normal CDF, N(x) = erfc(-x / sqrt 2) / 2. The libm erfc is
/// accurate to a few ulp over the whole real line, and evaluating through
/// erfc (not 1 + erf) keeps full relative accuracy in the lower tail.
template <typename Scalar>
Scalar normal_cdf(Scalar x) {
  return std::erfc(-x / std::numbers::sqrt2_v<Scalar>) / Scalar(2);
}

template <typename Scalar>
LogWealthLaw<Scalar> log_wealth_law(const MarketParams<Scalar>& m, const RebalancingRule<Scalar>& b) {
  m.require_dimension(b, "rule");
  const Scalar quad = b.weights.dot(m.covariance() * b.weights);
  return {m.rate() + m.excess_drift().dot(b.weights) - quad / Scalar(2), quad};
}

/// lim_{t -> inf} log V_t(b) / t.
template <typename Scalar>
Scalar growth_rate(const MarketParams<Scalar>& m, const RebalancingRule<Scalar>& b) {
  return log_wealth_law(m, b).mean_rate;
}

/// Law of log(V_t(b) / V_t(c)) when both rules see the same Brownian paths:
/// mean_rate = (mu - r1)'(b - c) + (c'Sigma c - b'Sigma b) / 2,
/// variance_rate = (b - c)'Sigma (b - c). Exactly zero when b == c.
template <typename Scalar>
LogWealthLaw<Scalar> log_ratio_law(const MarketParams<Scalar>& m, const RebalancingRule<Scalar>& b,
                                   const RebalancingRule<Scalar>& c) {
  m.require_dimension(b, "rule b");
  m.require_dimension(c, "rule c");
  const Vector<Scalar> diff = b.weights - c.weights;
  const auto& cov = m.covariance();
  const Scalar cc = c.weights.dot(cov * c.weights);
  const Scalar bb = b.weights.dot(cov * b.weights);
  return {m.excess_drift().dot(diff) + (cc - bb) / Scalar(2), diff.dot(cov * diff)};
}

/// pi(b, c) = (mu - r1 - Sigma c)'(b - c).
template <typename Scalar>
PayoffValue<Scalar> payoff_kernel(const MarketParams<Scalar>& m, const RebalancingRule<Scalar>& b,
                                  const RebalancingRule<Scalar>& c) {
  m.require_dimension(b, "rule b");
  m.require_dimension(c, "rule c");
  const Vector<Scalar> coeff = m.excess_drift() - m.covariance() * c.weights;
  return {coeff.dot(b.weights - c.weights)};
}

/// P{V_t(b) >= V_t(c)}. Ties count as wins, so t == 0 or b == c gives 1.
template <typename Scalar>
Scalar win_probability(const MarketParams<Scalar>& m, const RebalancingRule<Scalar>& b,
                       const RebalancingRule<Scalar>& c, Scalar t) {
  if (t < Scalar(0)) throw Error(Errc::invalid_argument, "time must be >= 0");
  const LogWealthLaw<Scalar> law = log_ratio_law(m, b, c);
  if (t == Scalar(0) || b == c || !(law.variance_rate > Scalar(0))) return Scalar(1);
  return normal_cdf(law.mean_rate * std::sqrt(t) / std::sqrt(law.variance_rate));
}

}  // namespace kelly
