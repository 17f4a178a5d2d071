#pragma once

// Finite-difference residual of the single-stock HJB equation for the
// relative-wealth game. With state (S, t, M1, M2) and controls b, c,
//
//   residual = J_t + mu S J_S + [r + b(mu - r)] M1 J_M1 + [r + c(mu - r)] M2 J_M2
//            + sigma^2/2 (S^2 J_SS + b^2 M1^2 J_M1M1 + c^2 M2^2 J_M2M2)
//            + sigma^2 (b S M1 J_SM1 + c S M2 J_SM2 + b c M1 M2 J_M1M2).
//
// A candidate J solves the equation at (b, c) when the residual vanishes. For
// J = M1 / M2 it collapses to (mu - r - sigma^2 c)(b - c) M1 / M2.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kellygame/market.hpp"

namespace kelly {

struct StatePoint {
  double S = 1.0;
  double t = 0.0;
  double M1 = 1.0;
  double M2 = 1.0;
};

struct CandidateValueFn {
  std::string name;
  std::function<double(const StatePoint&)> eval;

  double operator()(const StatePoint& x) const { return eval(x); }
};

/// J = M1 / M2.
CandidateValueFn ratio_candidate();
CandidateValueFn constant_candidate(double value = 1.0);

/// Default relative step; the identity tolerance of 1e-6 is pinned to it.
inline constexpr double kDefaultHjbStep = 1e-4;
inline constexpr double kDefaultHjbTolerance = 1e-6;

/// Central differences with step h (1 + |coordinate|) in every variable.
/// Throws DomainViolation when a stencil point leaves S, M1, M2 > 0.
double hjb_rhs(const Market& m, const CandidateValueFn& J, const StatePoint& x, double b, double c,
               double h = kDefaultHjbStep);

/// (mu - r - sigma^2 c)(b - c) M1 / M2.
double ratio_residual_closed_form(const Market& m, const StatePoint& x, double b, double c);

struct HjbEntry {
  std::string role;  // "p1" (c fixed at Kelly) or "p2" (b fixed at Kelly)
  StatePoint state;
  double b;
  double c;
  double residual;
  double closed_form;
  bool pass;
};

struct HjbReport {
  double kelly = 0.0;
  double step = kDefaultHjbStep;
  double tolerance = kDefaultHjbTolerance;
  std::vector<HjbEntry> entries;
  /// max |residual| over player 1's sweep.
  double worst_p1 = 0.0;
  /// min residual over player 2's sweep away from Kelly; must be > tolerance.
  double min_p2_off_kelly = 0.0;
  /// max |residual - closed form| over all entries.
  double worst_closed_form_gap = 0.0;
  bool terminal_condition = false;
  bool passed = false;
};

/// With c at Kelly every b gives residual 0 (player 1 is indifferent, so
/// Kelly is a best response). With b at Kelly the residual is >= 0 and
/// vanishes only at c = Kelly (Kelly uniquely minimizes). Both grids must
/// contain the Kelly value.
HjbReport verify_mutual_best_response(const Market& m, std::span<const double> grid_b,
                                      std::span<const double> grid_c, std::span<const StatePoint> probes,
                                      double h = kDefaultHjbStep, double tolerance = kDefaultHjbTolerance);

}  // namespace kelly
