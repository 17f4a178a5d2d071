#include "kellygame/phi_game.hpp"

#include <cmath>
#include <limits>

#include "kellygame/analytics.hpp"
#include "kellygame/format.hpp"
#include "kellygame/game_solver.hpp"
#include "kellygame/parallel.hpp"
#include "kellygame/philox.hpp"

namespace kelly {

namespace {

constexpr int kMaxResamples = 64;

double draw_uniform(const Philox4x32& rng, StreamDomain domain, std::uint64_t attempt, std::uint64_t index) {
  return uniform_pair(rng(stream_id(domain, attempt), index)).first;
}

}  // namespace

FairRandomization::FairRandomization(std::string name, double mean, std::function<double(double)> quantile)
    : name_(std::move(name)), mean_(mean), quantile_(std::move(quantile)) {
  if (!(mean_ >= 0.0 && mean_ <= 1.0)) {
    throw Error(Errc::invalid_argument, "fair randomization '" + name_ + "' has mean " + format_g17(mean_) +
                                            " outside [0, 1]");
  }
  if (!quantile_) throw Error(Errc::invalid_argument, "fair randomization needs a quantile function");
}

FairRandomization uniform_0_2() {
  return FairRandomization("uniform(0,2)", 1.0, [](double u) { return 2.0 * u; });
}

FairRandomization point_mass(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw Error(Errc::invalid_argument, "point mass must lie in [0, 1]");
  return FairRandomization("point(" + format_g17(a) + ")", a, [a](double) { return a; });
}

FairRandomization exponential(double mean) {
  if (!(mean > 0.0 && mean <= 1.0)) throw Error(Errc::invalid_argument, "exponential mean must lie in (0, 1]");
  return FairRandomization("exponential(" + format_g17(mean) + ")", mean,
                           [mean](double u) { return -mean * std::log1p(-u); });
}

PhiFunction indicator_phi() {
  return {"indicator", [](double x) { return x >= 1.0 ? 1.0 : 0.0; }};
}

PhiFunction identity_phi() {
  return {"identity", [](double x) { return x; }};
}

PhiFunction log_phi() {
  return {"log", [](double x) { return std::log(x); }};
}

PhiFunction phi_by_name(const std::string& name) {
  if (name == "indicator") return indicator_phi();
  if (name == "identity") return identity_phi();
  if (name == "log") return log_phi();
  throw Error(Errc::invalid_argument, "unknown phi '" + name + "' (expected indicator, identity or log)");
}

bool is_nondecreasing_on(const PhiFunction& phi, std::span<const double> grid) {
  double prev = -std::numeric_limits<double>::infinity();
  double prev_x = -std::numeric_limits<double>::infinity();
  for (double x : grid) {
    if (x < prev_x) return false;
    const double y = phi(x);
    if (y < prev) return false;
    prev = y;
    prev_x = x;
  }
  return true;
}

GameDraws draw_randomizations(const FairRandomization& w1, const FairRandomization& w2, std::int64_t samples,
                              std::uint64_t seed, unsigned threads) {
  if (samples < 1) throw Error(Errc::invalid_argument, "samples must be >= 1");
  const Philox4x32 rng(seed);
  GameDraws d;
  d.w1.resize(samples);
  d.w2.resize(samples);
  d.log_ratio = Eigen::VectorXd::Zero(samples);
  std::vector<int> redraws(static_cast<std::size_t>(samples), 0);

  detail::parallel_for(samples, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      d.w1[i] = w1.sample(draw_uniform(rng, StreamDomain::player1_wealth, 0, idx));
      int attempt = 0;
      double x = w2.sample(draw_uniform(rng, StreamDomain::player2_wealth, 0, idx));
      while (x == 0.0 && ++attempt < kMaxResamples) {
        x = w2.sample(draw_uniform(rng, StreamDomain::player2_wealth, static_cast<std::uint64_t>(attempt), idx));
      }
      d.w2[i] = x;
      redraws[static_cast<std::size_t>(i)] = attempt;
    }
  });

  for (std::int64_t i = 0; i < samples; ++i) {
    if (d.w2[i] == 0.0) {
      throw Error(Errc::division_degenerate,
                  "randomization '" + w2.name() + "' keeps drawing 0 for the denominator player");
    }
    d.resampled_zeros += static_cast<std::size_t>(redraws[static_cast<std::size_t>(i)]);
  }
  return d;
}

Eigen::VectorXd phi_payoffs(const GameDraws& draws, const PhiFunction& phi) {
  const Eigen::Index n = draws.w1.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = phi(draws.w1[i] / draws.w2[i] * std::exp(draws.log_ratio[i]));
  }
  return out;
}

GameDraws draw_investment_game(const Market& m, const Rule& b, const Rule& c, const FairRandomization& w1,
                               const FairRandomization& w2, double t, const SimConfig& cfg) {
  const PathBatch batch = simulate_paths(m, cfg);
  GameDraws d = draw_randomizations(w1, w2, cfg.paths, cfg.seed, cfg.threads);
  d.log_ratio = batch.log_ratio(m, b, c, t);
  return d;
}

PhiEstimate primitive_game_payoff(const FairRandomization& w1, const FairRandomization& w2, const PhiFunction& phi,
                                  std::int64_t samples, std::uint64_t seed) {
  const GameDraws d = draw_randomizations(w1, w2, samples, seed);
  return {mean_estimate(phi_payoffs(d, phi), seed), phi.name, d.resampled_zeros};
}

PhiEstimate investment_phi_game_payoff(const Market& m, const Rule& b, const Rule& c, const FairRandomization& w1,
                                       const FairRandomization& w2, const PhiFunction& phi, double t,
                                       const SimConfig& cfg) {
  const GameDraws d = draw_investment_game(m, b, c, w1, w2, t, cfg);
  return {mean_estimate(phi_payoffs(d, phi), cfg.seed), phi.name, d.resampled_zeros};
}

bool SandwichReport::passed() const {
  for (const auto& p : probes)
    if (!p.passed()) return false;
  return !probes.empty();
}

SandwichReport sandwich_check(const Market& m, std::span<const PhiProbe> probes, double t, const SimConfig& cfg) {
  if (probes.empty()) throw Error(Errc::invalid_argument, "sandwich_check needs at least one probe");
  const Rule kelly = kelly_rule(m);
  const PathBatch batch = simulate_paths(m, cfg);
  const PhiFunction phi = indicator_phi();
  const FairRandomization equilibrium = uniform_0_2();

  SandwichReport rep;
  for (const auto& probe : probes) {
    // log(V_t(probe) / V_t(kelly)) on the shared paths.
    const Eigen::VectorXd lr = batch.log_ratio(m, probe.rule, kelly, t);

    PhiProbeResult res{probe.rule, probe.randomization.name(), {}, {}, {}};

    GameDraws p1 = draw_randomizations(equilibrium, probe.randomization, cfg.paths, cfg.seed, cfg.threads);
    const Eigen::VectorXd composite = p1.w2.array() * lr.array().exp();
    res.composite = mean_estimate(composite, cfg.seed);
    res.composite_fair = res.composite.estimate <= 1.0 + rep.sigmas * res.composite.std_error;

    p1.log_ratio = -lr;
    res.p1_guarantee = mean_estimate(phi_payoffs(p1, phi), cfg.seed);
    res.p1_holds = res.p1_guarantee.estimate >= rep.value - rep.sigmas * res.p1_guarantee.std_error;

    GameDraws p2 = draw_randomizations(probe.randomization, equilibrium, cfg.paths, cfg.seed, cfg.threads);
    p2.log_ratio = lr;
    res.p2_guarantee = mean_estimate(phi_payoffs(p2, phi), cfg.seed);
    res.p2_holds = res.p2_guarantee.estimate <= rep.value + rep.sigmas * res.p2_guarantee.std_error;

    rep.probes.push_back(std::move(res));
  }
  return rep;
}

}  // namespace kelly
