#pragma once

// Zero-sum game over constant rebalancing rules with payoff kernel
// pi(b, c) = (mu - r1 - Sigma c)'(b - c). Player 1 (b) maximizes, Player 2 (c)
// minimizes. The unique equilibrium is b* = c* = Sigma^{-1}(mu - r1).

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kellygame/analytics.hpp"
#include "kellygame/market.hpp"

namespace kelly {

enum class ResponseKind { finite, unbounded_above, unbounded_below, indifferent };

inline const char* to_string(ResponseKind k) {
  switch (k) {
    case ResponseKind::finite: return "finite";
    case ResponseKind::unbounded_above: return "unbounded_above";
    case ResponseKind::unbounded_below: return "unbounded_below";
    case ResponseKind::indifferent: return "indifferent";
  }
  return "unknown";
}

/// Per-coordinate best response. `rule` is set only when every coordinate is
/// finite or indifferent; unbounded responses are never encoded as numbers.
template <typename Scalar>
struct BestResponseReport {
  std::vector<ResponseKind> kinds;
  std::optional<RebalancingRule<Scalar>> rule;

  bool all(ResponseKind k) const {
    for (ResponseKind x : kinds)
      if (x != k) return false;
    return true;
  }
};

template <typename Scalar>
struct GameSolution {
  RebalancingRule<Scalar> kelly;
  Scalar value_kernel;
  Scalar value_ratio;
  /// max_i |(Sigma kelly - (mu - r1))_i| / max(1, |mu - r1|_inf)
  Scalar residual;
};

template <typename Scalar>
struct SaddleReport {
  std::size_t probes = 0;
  /// min over probes c of pi(kelly, c); must be >= 0.
  Scalar min_p1_margin = std::numeric_limits<Scalar>::infinity();
  std::size_t min_p1_probe = 0;
  /// max over probes b of pi(b, kelly); must be <= 0.
  Scalar max_p2_margin = -std::numeric_limits<Scalar>::infinity();
  std::size_t max_p2_probe = 0;
  std::size_t violations = 0;
  /// Probes where pi(kelly, c) is within tolerance of 0 although c is more
  /// than 1e-10 away from kelly.
  std::size_t spurious_equalities = 0;

  bool holds() const { return violations == 0 && spurious_equalities == 0; }
};

/// Solves Sigma b = mu - r1 with the factor computed at market build.
template <typename Scalar>
RebalancingRule<Scalar> kelly_rule(const MarketParams<Scalar>& m) {
  const auto& llt = m.covariance_factor();
  if (llt.info() != Eigen::Success) throw Error(Errc::singular_covariance, "covariance not factored");
  return RebalancingRule<Scalar>(llt.solve(m.excess_drift()));
}

template <typename Scalar>
Scalar indifference_tolerance(Scalar excess) {
  return Scalar(1e-9) * (Scalar(1) + std::abs(excess));
}

/// Player 1's payoff is affine in b with slope mu - r1 - Sigma c, so each
/// coordinate is pushed to +inf, -inf, or is irrelevant.
template <typename Scalar>
BestResponseReport<Scalar> best_response_p1(const MarketParams<Scalar>& m, const RebalancingRule<Scalar>& c) {
  m.require_dimension(c, "rule c");
  const Vector<Scalar> hedge = m.covariance() * c.weights;
  const Vector<Scalar> excess = m.excess_drift();
  BestResponseReport<Scalar> report;
  report.kinds.reserve(static_cast<std::size_t>(m.dimension()));
  for (Eigen::Index i = 0; i < m.dimension(); ++i) {
    const Scalar gap = hedge[i] - excess[i];
    if (std::abs(gap) <= indifference_tolerance(excess[i]))
      report.kinds.push_back(ResponseKind::indifferent);
    else if (gap < Scalar(0))
      report.kinds.push_back(ResponseKind::unbounded_above);
    else
      report.kinds.push_back(ResponseKind::unbounded_below);
  }
  if (report.all(ResponseKind::indifferent)) report.rule = c;
  return report;
}

/// c*(b) = (b + kelly) / 2.
template <typename Scalar>
RebalancingRule<Scalar> best_response_p2(const MarketParams<Scalar>& m, const RebalancingRule<Scalar>& b) {
  m.require_dimension(b, "rule b");
  return RebalancingRule<Scalar>((b.weights + kelly_rule(m).weights) / Scalar(2));
}

template <typename Scalar>
GameSolution<Scalar> solve_game(const MarketParams<Scalar>& m) {
  RebalancingRule<Scalar> k = kelly_rule(m);
  const Vector<Scalar> excess = m.excess_drift();
  const Scalar scale = std::max(Scalar(1), excess.cwiseAbs().maxCoeff());
  const Scalar residual = (m.covariance() * k.weights - excess).cwiseAbs().maxCoeff() / scale;
  const Scalar value = payoff_kernel(m, k, k).kernel;
  return {std::move(k), value, std::exp(value), residual};
}

/// Checks pi(kelly, c) >= 0 and pi(b, kelly) <= 0 for every probe, allowing
/// `tolerance` of rounding.
template <typename Scalar>
SaddleReport<Scalar> verify_saddle(const MarketParams<Scalar>& m, std::span<const RebalancingRule<Scalar>> probes,
                                   Scalar tolerance = Scalar(1e-12)) {
  if (probes.empty()) throw Error(Errc::invalid_argument, "verify_saddle needs at least one probe");
  const RebalancingRule<Scalar> k = kelly_rule(m);
  SaddleReport<Scalar> rep;
  rep.probes = probes.size();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& p = probes[i];
    const Scalar p1 = payoff_kernel(m, k, p).kernel;
    const Scalar p2 = payoff_kernel(m, p, k).kernel;
    if (p1 < rep.min_p1_margin) {
      rep.min_p1_margin = p1;
      rep.min_p1_probe = i;
    }
    if (p2 > rep.max_p2_margin) {
      rep.max_p2_margin = p2;
      rep.max_p2_probe = i;
    }
    if (p1 < -tolerance) ++rep.violations;
    if (p2 > tolerance) ++rep.violations;
    const Scalar distance = (p.weights - k.weights).cwiseAbs().maxCoeff();
    if (std::abs(p1) <= tolerance && distance > Scalar(1e-10)) ++rep.spurious_equalities;
  }
  return rep;
}

template <typename Scalar>
SaddleReport<Scalar> verify_saddle(const MarketParams<Scalar>& m, const std::vector<RebalancingRule<Scalar>>& probes,
                                   Scalar tolerance = Scalar(1e-12)) {
  return verify_saddle(m, std::span<const RebalancingRule<Scalar>>(probes), tolerance);
}

/// kelly + delta e_i for each coordinate, plus kelly + delta 1, for
/// delta in {-2, -1, -0.5, 0, 0.5, 1, 2}.
template <typename Scalar>
std::vector<RebalancingRule<Scalar>> default_probes(const MarketParams<Scalar>& m) {
  const RebalancingRule<Scalar> k = kelly_rule(m);
  const Scalar offsets[] = {Scalar(-2), Scalar(-1), Scalar(-0.5), Scalar(0.5), Scalar(1), Scalar(2)};
  std::vector<RebalancingRule<Scalar>> probes{k};
  for (Scalar d : offsets) {
    for (Eigen::Index i = 0; i < m.dimension(); ++i) {
      RebalancingRule<Scalar> p = k;
      p.weights[i] += d;
      probes.push_back(std::move(p));
    }
    if (m.dimension() > 1) probes.emplace_back((k.weights.array() + d).matrix());
  }
  return probes;
}

}  // namespace kelly
