#pragma once

// Fair randomizations and the investment phi-game. A fair randomization is a
// random initial wealth W >= 0 with E[W] <= 1. In the investment phi-game
// player 1 holds W1 V_t(b), player 2 holds W2 V_t(c), and the payoff is
// E[phi(W1 V_t(b) / (W2 V_t(c)))] with W1, W2 independent of each other and
// of the stock prices.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kellygame/market.hpp"
#include "kellygame/monte_carlo.hpp"

namespace kelly {

/// A law on [0, inf) given by its quantile function, with an analytic mean
/// that must not exceed 1.
class FairRandomization {
 public:
  FairRandomization(std::string name, double mean, std::function<double(double)> quantile);

  const std::string& name() const { return name_; }
  double mean() const { return mean_; }
  /// Quantile at u in (0, 1).
  double sample(double u) const { return quantile_(u); }

 private:
  std::string name_;
  double mean_;
  std::function<double(double)> quantile_;
};

/// Uniform on (0, 2); the equilibrium randomization of the indicator game.
FairRandomization uniform_0_2();
/// W = a with certainty, 0 <= a <= 1.
FairRandomization point_mass(double a = 1.0);
/// Exponential with the given mean in (0, 1].
FairRandomization exponential(double mean = 1.0);

/// A nondecreasing map phi : (0, inf) -> R.
struct PhiFunction {
  std::string name;
  std::function<double(double)> eval;

  double operator()(double x) const { return eval(x); }
};

/// 1 on [1, inf), 0 below.
PhiFunction indicator_phi();
PhiFunction identity_phi();
PhiFunction log_phi();
/// Looks up "indicator", "identity" or "log".
PhiFunction phi_by_name(const std::string& name);

/// Spot check of monotonicity on a probe grid.
bool is_nondecreasing_on(const PhiFunction& phi, std::span<const double> grid);

struct PhiEstimate {
  Estimate estimate;
  std::string phi;
  /// Draws of W2 that came out exactly 0 and were redrawn.
  std::size_t resampled_zeros = 0;
};

/// Independent per-sample draws of both players' randomizations and the
/// log wealth ratio they multiply.
struct GameDraws {
  Eigen::VectorXd w1;
  Eigen::VectorXd w2;
  Eigen::VectorXd log_ratio;
  std::size_t resampled_zeros = 0;
};

/// Draws `samples` independent copies of (W1, W2) from the player streams of
/// `seed`. W2 == 0 is redrawn; a law that keeps producing 0 throws
/// DivisionDegenerate.
GameDraws draw_randomizations(const FairRandomization& w1, const FairRandomization& w2, std::int64_t samples,
                              std::uint64_t seed, unsigned threads = 0);

/// Per-sample phi(W1 exp(log_ratio) / W2).
Eigen::VectorXd phi_payoffs(const GameDraws& draws, const PhiFunction& phi);

/// Draws whose log_ratio comes from simulated wealths V_t(b), V_t(c).
GameDraws draw_investment_game(const Market& m, const Rule& b, const Rule& c, const FairRandomization& w1,
                               const FairRandomization& w2, double t, const SimConfig& cfg);

/// Monte Carlo E[phi(W1 / W2)].
PhiEstimate primitive_game_payoff(const FairRandomization& w1, const FairRandomization& w2, const PhiFunction& phi,
                                  std::int64_t samples, std::uint64_t seed);

/// Monte Carlo E[phi(W1 V_t(b) / (W2 V_t(c)))]; cfg.paths is the sample size.
PhiEstimate investment_phi_game_payoff(const Market& m, const Rule& b, const Rule& c, const FairRandomization& w1,
                                       const FairRandomization& w2, const PhiFunction& phi, double t,
                                       const SimConfig& cfg);

struct PhiProbe {
  Rule rule;
  FairRandomization randomization;
};

struct PhiProbeResult {
  Rule rule;
  std::string randomization;
  /// Sample mean of W V_t(rule) / V_t(kelly); fair when <= 1 + 4 SE.
  Estimate composite;
  /// Player 1 at (uniform(0,2), kelly) against the probe as player 2.
  Estimate p1_guarantee;
  /// The probe as player 1 against (uniform(0,2), kelly) as player 2.
  Estimate p2_guarantee;
  bool composite_fair = false;
  bool p1_holds = false;
  bool p2_holds = false;

  bool passed() const { return composite_fair && p1_holds && p2_holds; }
};

struct SandwichReport {
  double value = 0.5;
  double sigmas = 4.0;
  std::vector<PhiProbeResult> probes;

  bool passed() const;
};

/// Equilibrium sandwich for the indicator game: the Kelly rule with a
/// uniform(0,2) randomization forces the payoff >= 1/2 for player 1 and
/// <= 1/2 for player 2, up to 4 standard errors.
SandwichReport sandwich_check(const Market& m, std::span<const PhiProbe> probes, double t, const SimConfig& cfg);

}  // namespace kelly
