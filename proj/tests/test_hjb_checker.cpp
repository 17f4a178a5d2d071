#include "doctest.h"

#include <cmath>
#include <vector>

#include "kellygame/game_solver.hpp"
#include "kellygame/hjb_checker.hpp"

using namespace kelly;

namespace {

const std::vector<StatePoint> kProbes{{1, 0, 1, 1}, {1, 0, 2, 1}, {1, 0, 1, 2}, {2.5, 0.3, 1, 1}};

std::vector<double> default_grid(double k) {
  std::vector<double> g;
  for (double d : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) g.push_back(k + d);
  return g;
}

}  // namespace

TEST_CASE("ratio candidate residuals at the reference points") {
  const Market m = shannon_demon_market();
  const auto J = ratio_candidate();
  const StatePoint x{};
  // (mu - r - sigma^2 c)(b - c) with b at Kelly.
  const std::vector<std::pair<double, double>> expected{{-1.0, 1.0810192813159532},
                                                        {0.0, 0.12011325347955035},
                                                        {0.25, 0.030028313369887587},
                                                        {0.5, 0.0},
                                                        {1.0, 0.12011325347955035}};
  for (const auto& [c, value] : expected) {
    CHECK(std::abs(hjb_rhs(m, J, x, 0.5, c) - value) <= 1e-6);
    CHECK(ratio_residual_closed_form(m, x, 0.5, c) == doctest::Approx(value).epsilon(1e-13));
  }
  for (double b : {-2.0, 0.0, 0.5, 1.0, 3.0}) CHECK(std::abs(hjb_rhs(m, J, x, b, 0.5)) <= 1e-6);
  CHECK(std::abs(hjb_rhs(m, J, x, 1.0, 0.5)) <= 1e-6);
}

TEST_CASE("generator against hand-derived derivatives of a test function") {
  // J = S M1^2 / M2 + t exercises every partial derivative the generator uses.
  const Market m = build_market(0.03, 0.11, 0.4);
  const CandidateValueFn J{"probe", [](const StatePoint& x) { return x.S * x.M1 * x.M1 / x.M2 + x.t; }};
  const double r = 0.03, mu = 0.11, v = 0.16;
  for (const StatePoint& x : kProbes) {
    for (double b : {-1.0, 0.4, 2.0}) {
      for (double c : {-0.5, 0.7}) {
        const double S = x.S, M1 = x.M1, M2 = x.M2;
        const double jt = 1, js = M1 * M1 / M2, j1 = 2 * S * M1 / M2, j2 = -S * M1 * M1 / (M2 * M2);
        const double jss = 0, j11 = 2 * S / M2, j22 = 2 * S * M1 * M1 / (M2 * M2 * M2);
        const double js1 = 2 * M1 / M2, js2 = -M1 * M1 / (M2 * M2), j12 = -2 * S * M1 / (M2 * M2);
        const double exact = jt + mu * S * js + (r + b * (mu - r)) * M1 * j1 + (r + c * (mu - r)) * M2 * j2 +
                             0.5 * v * (S * S * jss + b * b * M1 * M1 * j11 + c * c * M2 * M2 * j22) +
                             v * (b * S * M1 * js1 + c * S * M2 * js2 + b * c * M1 * M2 * j12);
        CHECK(std::abs(hjb_rhs(m, J, x, b, c) - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
      }
    }
  }
}

TEST_CASE("the identity holds at the default step over the default grid") {
  const Market m = shannon_demon_market();
  const auto J = ratio_candidate();
  const auto grid = default_grid(0.5);
  for (const StatePoint& x : kProbes) {
    for (double b : grid) {
      for (double c : grid) {
        const double fd = hjb_rhs(m, J, x, b, c);
        CHECK(std::abs(fd - ratio_residual_closed_form(m, x, b, c)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("constant candidate has zero residual everywhere") {
  const Market m = shannon_demon_market();
  for (double b : {-2.0, 0.5, 2.5}) CHECK(hjb_rhs(m, constant_candidate(3.0), {}, b, 1.0) == 0.0);
}

TEST_CASE("verify_mutual_best_response") {
  const Market m = shannon_demon_market();
  const auto grid = default_grid(kelly_rule(m)[0]);
  const auto rep = verify_mutual_best_response(m, grid, grid, kProbes);
  CHECK(rep.passed);
  CHECK(rep.terminal_condition);
  CHECK(rep.worst_p1 <= 1e-6);
  CHECK(rep.min_p2_off_kelly > 1e-6);
  CHECK(rep.worst_closed_form_gap <= 1e-6);
  CHECK(rep.entries.size() == kProbes.size() * grid.size() * 2);

  const Market other = build_market(0.01, 0.09, 0.25);
  const auto grid2 = default_grid(kelly_rule(other)[0]);
  CHECK(verify_mutual_best_response(other, grid2, grid2, kProbes).passed);

  const std::vector<double> no_kelly{0.0, 1.0};
  CHECK_THROWS_AS(verify_mutual_best_response(m, no_kelly, grid, kProbes), Error);
}

TEST_CASE("domain and dimension errors") {
  const Market m = shannon_demon_market();
  try {
    hjb_rhs(m, ratio_candidate(), StatePoint{1, 0, 1e-5, 1}, 0.5, 0.5);
    FAIL("expected DomainViolation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::domain_violation);
  }
  Vector<double> mu(2), sigma(2);
  mu << 0.1, 0.1;
  sigma << 1, 1;
  const Market two = build_market<double>(0.0, mu, sigma, Matrix<double>::Identity(2, 2));
  CHECK_THROWS_AS(hjb_rhs(two, ratio_candidate(), {}, 0.5, 0.5), Error);
}
