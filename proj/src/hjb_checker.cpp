#include "kellygame/hjb_checker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kellygame/format.hpp"
#include "kellygame/game_solver.hpp"

namespace kelly {

namespace {

void require_univariate(const Market& m) {
  if (m.dimension() != 1) {
    throw Error(Errc::invalid_argument, "the HJB check covers single-stock markets only");
  }
}

double step_for(double coordinate, double h) { return h * (1.0 + std::abs(coordinate)); }

bool contains(std::span<const double> grid, double value) {
  return std::any_of(grid.begin(), grid.end(),
                     [&](double g) { return std::abs(g - value) <= 1e-9 * (1.0 + std::abs(value)); });
}

}  // namespace

CandidateValueFn ratio_candidate() {
  return {"M1/M2", [](const StatePoint& x) { return x.M1 / x.M2; }};
}

CandidateValueFn constant_candidate(double value) {
  return {"constant(" + format_g17(value) + ")", [value](const StatePoint&) { return value; }};
}

double hjb_rhs(const Market& m, const CandidateValueFn& J, const StatePoint& x, double b, double c, double h) {
  require_univariate(m);
  if (!(h > 0.0)) throw Error(Errc::invalid_argument, "finite-difference step must be > 0");
  const double hs = step_for(x.S, h);
  const double ht = step_for(x.t, h);
  const double h1 = step_for(x.M1, h);
  const double h2 = step_for(x.M2, h);
  if (!(x.S - hs > 0.0) || !(x.M1 - h1 > 0.0) || !(x.M2 - h2 > 0.0)) {
    throw Error(Errc::domain_violation, "finite-difference stencil leaves the positive orthant");
  }

  const auto at = [&](double dS, double dt, double d1, double d2) {
    return J(StatePoint{x.S + dS, x.t + dt, x.M1 + d1, x.M2 + d2});
  };
  const double j0 = at(0, 0, 0, 0);

  const double jt = (at(0, ht, 0, 0) - at(0, -ht, 0, 0)) / (2 * ht);
  const double js = (at(hs, 0, 0, 0) - at(-hs, 0, 0, 0)) / (2 * hs);
  const double j1 = (at(0, 0, h1, 0) - at(0, 0, -h1, 0)) / (2 * h1);
  const double j2 = (at(0, 0, 0, h2) - at(0, 0, 0, -h2)) / (2 * h2);

  const double jss = (at(hs, 0, 0, 0) - 2 * j0 + at(-hs, 0, 0, 0)) / (hs * hs);
  const double j11 = (at(0, 0, h1, 0) - 2 * j0 + at(0, 0, -h1, 0)) / (h1 * h1);
  const double j22 = (at(0, 0, 0, h2) - 2 * j0 + at(0, 0, 0, -h2)) / (h2 * h2);

  const auto cross = [&](double da, double db, auto&& shift) {
    return (shift(da, db) - shift(da, -db) - shift(-da, db) + shift(-da, -db)) / (4 * da * db);
  };
  const double js1 = cross(hs, h1, [&](double a, double d) { return at(a, 0, d, 0); });
  const double js2 = cross(hs, h2, [&](double a, double d) { return at(a, 0, 0, d); });
  const double j12 = cross(h1, h2, [&](double a, double d) { return at(0, 0, a, d); });

  const double r = m.rate();
  const double mu = m.drift()[0];
  const double var = m.covariance()(0, 0);

  const double generator = mu * x.S * js + (r + b * (mu - r)) * x.M1 * j1 + (r + c * (mu - r)) * x.M2 * j2 +
                           0.5 * var * x.S * x.S * jss + 0.5 * b * b * var * x.M1 * x.M1 * j11 +
                           0.5 * c * c * var * x.M2 * x.M2 * j22 + b * var * x.S * x.M1 * js1 +
                           c * var * x.S * x.M2 * js2 + b * c * var * x.M1 * x.M2 * j12;
  return generator + jt;
}

double ratio_residual_closed_form(const Market& m, const StatePoint& x, double b, double c) {
  require_univariate(m);
  const double slope = m.drift()[0] - m.rate() - m.covariance()(0, 0) * c;
  return slope * (b - c) * x.M1 / x.M2;
}

HjbReport verify_mutual_best_response(const Market& m, std::span<const double> grid_b,
                                      std::span<const double> grid_c, std::span<const StatePoint> probes,
                                      double h, double tolerance) {
  require_univariate(m);
  if (probes.empty()) throw Error(Errc::invalid_argument, "at least one state probe is required");
  const double kelly = kelly_rule(m)[0];
  if (!contains(grid_b, kelly) || !contains(grid_c, kelly)) {
    throw Error(Errc::invalid_argument, "both grids must contain the Kelly value " + format_g17(kelly));
  }

  const CandidateValueFn J = ratio_candidate();
  HjbReport rep;
  rep.kelly = kelly;
  rep.step = h;
  rep.tolerance = tolerance;
  rep.min_p2_off_kelly = std::numeric_limits<double>::infinity();
  bool ok = true;

  const auto gap_ok = [&](double residual, double expected) {
    const double gap = std::abs(residual - expected);
    rep.worst_closed_form_gap = std::max(rep.worst_closed_form_gap, gap);
    return gap <= tolerance * std::max(1.0, std::abs(expected));
  };

  for (const StatePoint& x : probes) {
    for (double b : grid_b) {
      const double res = hjb_rhs(m, J, x, b, kelly, h);
      const double expected = ratio_residual_closed_form(m, x, b, kelly);
      rep.worst_p1 = std::max(rep.worst_p1, std::abs(res));
      const bool pass = std::abs(res) <= tolerance && gap_ok(res, expected);
      ok = ok && pass;
      rep.entries.push_back({"p1", x, b, kelly, res, expected, pass});
    }
    for (double c : grid_c) {
      const double res = hjb_rhs(m, J, x, kelly, c, h);
      const double expected = ratio_residual_closed_form(m, x, kelly, c);
      const bool at_kelly = contains(std::span<const double>(&c, 1), kelly);
      bool pass = gap_ok(res, expected);
      if (at_kelly) {
        pass = pass && std::abs(res) <= tolerance;
      } else {
        rep.min_p2_off_kelly = std::min(rep.min_p2_off_kelly, res);
        pass = pass && res > tolerance;
      }
      ok = ok && pass;
      rep.entries.push_back({"p2", x, kelly, c, res, expected, pass});
    }
  }

  // J(S, T, M1, M2) = M1 / M2 at an arbitrary terminal time.
  rep.terminal_condition = true;
  for (const StatePoint& x : probes) {
    const StatePoint terminal{x.S, 1.0, x.M1, x.M2};
    rep.terminal_condition = rep.terminal_condition && J(terminal) == x.M1 / x.M2;
  }
  rep.passed = ok && rep.terminal_condition;
  return rep;
}

}  // namespace kelly
