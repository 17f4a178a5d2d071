#include "doctest.h"

#include <cmath>
#include <random>

#include "kellygame/game_solver.hpp"

using namespace kelly;

namespace {

Market two_asset() {
  Vector<double> mu(2), sigma(2);
  mu << 0.06, 0.1;
  sigma << 0.2, 0.3;
  Matrix<double> rho(2, 2);
  rho << 1, 0.4, 0.4, 1;
  return build_market(0.02, mu, sigma, rho);
}

Market identity_market(double r, double mu1, double mu2) {
  Vector<double> mu(2);
  mu << mu1, mu2;
  return build_market<double>(r, mu, Vector<double>::Ones(2), Matrix<double>::Identity(2, 2));
}

}  // namespace

TEST_CASE("kelly_rule") {
  CHECK(std::abs(kelly_rule(shannon_demon_market())[0] - 0.5) <= 1e-12);

  const Rule k = kelly_rule(identity_market(0.02, 0.12, 0.22));
  CHECK(k[0] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(k[1] == doctest::Approx(0.2).epsilon(1e-14));

  SUBCASE("two assets against a brute-force growth-rate grid") {
    const Market m = two_asset();
    const Rule kk = kelly_rule(m);
    CHECK(kk[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-13));
    CHECK(kk[1] == doctest::Approx(20.0 / 27.0).epsilon(1e-13));
    const double s11 = 0.04, s12 = 0.024, s22 = 0.09, e1 = 0.04, e2 = 0.08;
    double best = -1e300;
    int a1 = 0, a2 = 0;
    for (int i = -3000; i <= 3000; ++i) {
      const double b1 = i * 1e-3;
      for (int j = -3000; j <= 3000; ++j) {
        const double b2 = j * 1e-3;
        const double g = e1 * b1 + e2 * b2 - 0.5 * (s11 * b1 * b1 + 2 * s12 * b1 * b2 + s22 * b2 * b2);
        if (g > best) {
          best = g;
          a1 = i;
          a2 = j;
        }
      }
    }
    CHECK(std::abs(kk[0] - a1 * 1e-3) <= 1e-3);
    CHECK(std::abs(kk[1] - a2 * 1e-3) <= 1e-3);
  }
}

TEST_CASE("best_response_p1 classifies each coordinate") {
  const Market m = shannon_demon_market();
  auto rep = best_response_p1(m, Rule{1.0});
  CHECK(rep.kinds == std::vector{ResponseKind::unbounded_below});
  CHECK_FALSE(rep.rule.has_value());

  rep = best_response_p1(m, Rule{0.5});
  CHECK(rep.kinds == std::vector{ResponseKind::indifferent});
  REQUIRE(rep.rule.has_value());
  CHECK((*rep.rule)[0] == 0.5);

  rep = best_response_p1(m, Rule{0.0});
  CHECK(rep.kinds == std::vector{ResponseKind::unbounded_above});

  const Market m2 = two_asset();
  Rule c = kelly_rule(m2);
  c.weights[0] += 1.0;
  // Sigma c exceeds the excess drift in both rows (rho > 0).
  rep = best_response_p1(m2, c);
  CHECK(rep.kinds == std::vector{ResponseKind::unbounded_below, ResponseKind::unbounded_below});
  CHECK_FALSE(rep.all(ResponseKind::finite));
}

TEST_CASE("best_response_p2") {
  const Market m = shannon_demon_market();
  CHECK(best_response_p2(m, Rule{0.5})[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(best_response_p2(m, Rule{1.0})[0] == doctest::Approx(0.75).epsilon(1e-14));

  // Grid minimization of (mu - r - sigma^2 c)(b - c) at b = 1, step 1e-5.
  const double mu = m.drift()[0], s2 = m.covariance()(0, 0);
  double best = 1e300, arg = 0.0;
  for (int i = -200000; i <= 200000; ++i) {
    const double c = i * 1e-5;
    const double f = (mu - s2 * c) * (1.0 - c);
    if (f < best) {
      best = f;
      arg = c;
    }
  }
  CHECK(arg == doctest::Approx(0.75).epsilon(1e-12));

  const Rule c = best_response_p2(identity_market(0.0, 0.1, 0.2), Rule{0.0, 0.0});
  CHECK(c[0] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(c[1] == doctest::Approx(0.10).epsilon(1e-14));
}

TEST_CASE("verify_saddle") {
  const Market m = shannon_demon_market();
  const std::vector<Rule> probes{Rule{-1.0}, Rule{0.0}, Rule{0.5}, Rule{1.0}, Rule{2.0}};
  const auto rep = verify_saddle(m, probes);
  CHECK(rep.holds());
  CHECK(rep.violations == 0);
  CHECK(rep.min_p1_probe == 2);
  CHECK(std::abs(rep.min_p1_margin) <= 1e-15);
  CHECK(std::abs(rep.max_p2_margin) <= 1e-15);

  CHECK(payoff_kernel(m, kelly_rule(m), Rule{1.0}).kernel == doctest::Approx(0.1201).epsilon(1e-3));

  const Market m2 = two_asset();
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<Rule> random;
  for (int i = 0; i < 10000; ++i) random.push_back(Rule{u(gen), u(gen)});
  const auto rep2 = verify_saddle(m2, random);
  CHECK(rep2.violations == 0);
  CHECK(rep2.spurious_equalities == 0);
  CHECK(rep2.min_p1_margin > 0.0);

  CHECK_THROWS_AS(verify_saddle(m, std::vector<Rule>{}), Error);
}

TEST_CASE("a non-equilibrium 'kelly' would be caught") {
  // pi(b, c) with b = 0.4 against c = 0.45 is negative: b = 0.4 is not a
  // maximin strategy. The saddle report must see this through the kernel.
  const Market m = shannon_demon_market();
  CHECK(payoff_kernel(m, Rule{0.4}, Rule{0.45}).kernel < 0.0);
}

TEST_CASE("properties of the equilibrium") {
  const Market m = two_asset();
  const Rule k = kelly_rule(m);
  const auto fixed = best_response_p2(m, k);
  CHECK((fixed.weights - k.weights).cwiseAbs().maxCoeff() <= 1e-12);

  const auto sol = solve_game(m);
  CHECK(sol.residual <= 1e-10);
  CHECK(std::abs(sol.value_kernel) <= 1e-15);
  CHECK(sol.value_ratio == doctest::Approx(1.0));

  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_real_distribution<double> small(-0.7, 0.7);
  const double g_star = growth_rate(m, k);
  for (int i = 0; i < 1000; ++i) {
    const Rule c{u(gen), u(gen)};
    const Vector<double> d = c.weights - k.weights;
    const double quad = d.dot(m.covariance() * d);
    CHECK(std::abs(payoff_kernel(m, k, c).kernel - quad) <= 1e-10);
    CHECK(std::abs(payoff_kernel(m, c, k).kernel) <= 1e-14);

    const Rule perturbed{k[0] + small(gen), k[1] + small(gen)};
    CHECK(growth_rate(m, perturbed) < g_star);
  }
}

TEST_CASE("default probes bracket the equilibrium") {
  const Market m = two_asset();
  const auto probes = default_probes(m);
  CHECK(probes.size() == 1 + 6 * 3);
  CHECK(verify_saddle(m, probes).holds());
  CHECK(default_probes(shannon_demon_market()).size() == 7);
}
