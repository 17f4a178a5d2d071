#include "doctest.h"

#include <cmath>
#include <vector>

#include "kellygame/analytics.hpp"
#include "kellygame/game_solver.hpp"
#include "kellygame/phi_game.hpp"

using namespace kelly;

namespace {

SimConfig config(double T, std::int64_t paths, std::uint64_t seed) {
  SimConfig cfg;
  cfg.horizon = T;
  cfg.steps = 1;
  cfg.paths = paths;
  cfg.seed = seed;
  cfg.threads = 1;
  return cfg;
}

bool within(const Estimate& e, double expected, double sigmas = 4.0) {
  return std::abs(e.estimate - expected) <= sigmas * e.std_error;
}

}  // namespace

TEST_CASE("fair randomizations") {
  CHECK(uniform_0_2().mean() == 1.0);
  CHECK(uniform_0_2().sample(0.25) == 0.5);
  CHECK(point_mass(0.3).sample(0.9) == 0.3);
  CHECK(exponential(0.5).sample(1 - std::exp(-2.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(point_mass(1.5), Error);
  CHECK_THROWS_AS(exponential(2.0), Error);
  CHECK_THROWS_AS(FairRandomization("too rich", 1.2, [](double) { return 1.2; }), Error);
  CHECK_NOTHROW(FairRandomization("broke", 0.0, [](double) { return 0.0; }));

  const auto d = draw_randomizations(uniform_0_2(), exponential(), 50000, 4);
  CHECK(d.w1.minCoeff() > 0.0);
  CHECK(d.w1.maxCoeff() < 2.0);
  CHECK(std::abs(d.w1.mean() - 1.0) < 4 * std::sqrt(1.0 / 3.0 / 50000));
  CHECK(std::abs(d.w2.mean() - 1.0) < 4 * std::sqrt(1.0 / 50000));
  CHECK(d.resampled_zeros == 0);
}

TEST_CASE("phi functions") {
  CHECK(indicator_phi()(1.0) == 1.0);
  CHECK(indicator_phi()(0.999999) == 0.0);
  CHECK(log_phi()(std::exp(2.0)) == doctest::Approx(2.0));
  CHECK(phi_by_name("identity")(3.5) == 3.5);
  try {
    phi_by_name("sqrt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_argument);
  }
  const std::vector<double> grid{0.1, 0.5, 1.0, 2.0, 10.0};
  CHECK(is_nondecreasing_on(indicator_phi(), grid));
  CHECK(is_nondecreasing_on(log_phi(), grid));
  CHECK_FALSE(is_nondecreasing_on({"decreasing", [](double x) { return -x; }}, grid));
}

TEST_CASE("degenerate denominator") {
  const FairRandomization zero("zero", 0.0, [](double) { return 0.0; });
  try {
    draw_randomizations(uniform_0_2(), zero, 10, 1);
    FAIL("expected DivisionDegenerate");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::division_degenerate);
  }
  // An atom at 0 with probability 1/2 is redrawn, never divided by.
  const FairRandomization half_atom("atom", 0.5, [](double u) { return u < 0.5 ? 0.0 : 1.0; });
  const auto d = draw_randomizations(uniform_0_2(), half_atom, 20000, 2);
  CHECK(d.w2.minCoeff() == 1.0);
  // Geometric redraw counts: mean 1 and variance 2 per sample.
  CHECK(std::abs(static_cast<double>(d.resampled_zeros) - 20000.0) < 4 * std::sqrt(40000.0));
}

TEST_CASE("primitive indicator game against exact probabilities") {
  const auto phi = indicator_phi();
  const std::int64_t n = 200000;
  // P(W1 >= W2) for the laws below, by direct integration.
  CHECK(within(primitive_game_payoff(uniform_0_2(), point_mass(1.0), phi, n, 1).estimate, 0.5));
  CHECK(within(primitive_game_payoff(uniform_0_2(), uniform_0_2(), phi, n, 2).estimate, 0.5));
  CHECK(within(primitive_game_payoff(uniform_0_2(), exponential(), phi, n, 3).estimate, 0.5 + std::exp(-2.0) / 2));
  CHECK(within(primitive_game_payoff(exponential(), uniform_0_2(), phi, n, 4).estimate, (1 - std::exp(-2.0)) / 2));
  CHECK(within(primitive_game_payoff(point_mass(0.6), uniform_0_2(), phi, n, 5).estimate, 0.3));
  // Uniform(0, 2) guarantees 1/2 from both sides.
  CHECK(primitive_game_payoff(uniform_0_2(), exponential(0.4), phi, n, 6).estimate.estimate >= 0.5);
  CHECK(within(primitive_game_payoff(point_mass(1.0), uniform_0_2(), phi, n, 7).estimate, 0.5));
}

TEST_CASE("investment game with point masses reduces to the ratio kernel") {
  const Market m = shannon_demon_market();
  const Rule b{0.5}, c{1.0};
  const double t = 2.0;
  const auto cfg = config(t, 200000, 11);
  const auto id = investment_phi_game_payoff(m, b, c, point_mass(0.8), point_mass(0.5), identity_phi(), t, cfg);
  CHECK(within(id.estimate, 0.8 / 0.5 * payoff_kernel(m, b, c).ratio_at(t)));
  CHECK(id.phi == "identity");

  const auto lg = investment_phi_game_payoff(m, b, c, point_mass(1.0), point_mass(1.0), log_phi(), t, cfg);
  CHECK(within(lg.estimate, log_ratio_law(m, b, c).mean(t)));

  const auto ind = investment_phi_game_payoff(m, b, c, point_mass(1.0), point_mass(1.0), indicator_phi(), t, cfg);
  CHECK(within(ind.estimate, win_probability(m, b, c, t)));
}

TEST_CASE("equilibrium sandwich at the Kelly rule") {
  const Market m = shannon_demon_market();
  const std::vector<PhiProbe> probes{
      {Rule{0.0}, point_mass(1.0)}, {Rule{1.0}, point_mass(1.0)}, {Rule{2.0}, exponential()},
      {Rule{0.5}, point_mass(1.0)}, {Rule{1.0}, uniform_0_2()},
  };
  const auto rep = sandwich_check(m, probes, 10.0, config(10.0, 100000, 99));
  REQUIRE(rep.probes.size() == probes.size());
  CHECK(rep.passed());
  for (const auto& p : rep.probes) {
    CHECK(p.composite_fair);
    CHECK(p.p1_holds);
    CHECK(p.p2_holds);
  }
  // Kelly against itself with point mass 1: exactly P(U(0,2) >= 1) = 1/2.
  CHECK(within(rep.probes[3].p1_guarantee, 0.5));
  CHECK(rep.probes[3].composite.estimate == 1.0);
}

TEST_CASE("the sandwich fails for a player who abandons Kelly") {
  // Player 1 holding uniform(0,2) on the all-stock rule against a Kelly
  // opponent with point mass 1 falls strictly below 1/2 at t = 10:
  // P(U V(1)/V(1/2) >= 1) with log-ratio mean -0.12 t.
  const Market m = shannon_demon_market();
  const auto cfg = config(10.0, 100000, 5);
  const auto e = investment_phi_game_payoff(m, Rule{1.0}, Rule{0.5}, uniform_0_2(), point_mass(1.0),
                                            indicator_phi(), 10.0, cfg);
  CHECK(e.estimate.estimate + 4 * e.estimate.std_error < 0.5);
}

TEST_CASE("phi-game draws are reproducible") {
  const Market m = shannon_demon_market();
  auto cfg = config(3.0, 5000, 8);
  const auto a = draw_investment_game(m, Rule{0.5}, Rule{1.0}, uniform_0_2(), exponential(), 3.0, cfg);
  cfg.threads = 3;
  const auto b = draw_investment_game(m, Rule{0.5}, Rule{1.0}, uniform_0_2(), exponential(), 3.0, cfg);
  CHECK(a.w1 == b.w1);
  CHECK(a.w2 == b.w2);
  CHECK(a.log_ratio == b.log_ratio);
}
