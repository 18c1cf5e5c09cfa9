#pragma once

#include <stdexcept>

#include "delaymid/quasipoly.hpp"
#include "delaymid/rootfinder.hpp"

namespace delaymid {

/// Scalar plant with two delayed outputs fed back through one input:
///   x' = a x + b (k1 y1 + k2 y2)(t - tau),
///   y_i = c_i x + d_i (k1 y1 + k2 y2)(t - tau).
struct FeedbackPlant {
  double a = 0.0;
  double b = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double tau = 1.0;  ///< must be > 0

  double delta1() const { return a * d1 - b * c1; }
  double delta2() const { return a * d2 - b * c2; }
};

struct FeedbackGains {
  double k1 = 0.0;
  double k2 = 0.0;
};

/// Lossless transmission line driven by a resistive source and loaded by a
/// parallel RC; all parameters strictly positive.
struct CircuitParams {
  double R0 = 1.0;
  double R1 = 1.0;
  double C1 = 1.0;
  double L = 1.0;
  double C = 1.0;
};

enum class Solvability { Unique, InfinitelyMany, None };

const char* to_string(Solvability s);

struct NotStabilizableError : std::domain_error {
  using std::domain_error::domain_error;
};
struct UnsolvableError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Solvability of the 2x2 gain system: Unique when d1 delta2 != d2 delta1,
/// InfinitelyMany when the rows are proportional with the matching
/// consistency relation delta_i = (a - 4/tau) d_i, None otherwise.
Solvability solvability(const FeedbackPlant& plant);

struct DesignResult {
  FeedbackGains gains;
  double s0 = 0.0;  ///< the placed triple root, a - 2/tau
};

/// Gains that give the closed loop a real root of maximal multiplicity 3
/// at s0 = a - 2/tau (which dominance then makes the decay rate).  Throws
/// NotStabilizableError when a > 0 and tau >= 2/a, UnsolvableError when the
/// gain system has no solution; picks the minimum-norm solution in the
/// underdetermined case.
DesignResult design_gains(const FeedbackPlant& plant);

/// Closed-loop characteristic quasipolynomial
///   s - a - e^{-s tau} ((d1 k1 + d2 k2) s - k1 delta1 - k2 delta2).
Quasipolynomial from_feedback(const FeedbackPlant& plant, const FeedbackGains& gains);

struct VerifyReport {
  double s0 = 0.0;
  MultiplicityResult multiplicity;
  std::vector<double> derivative_residuals;  ///< scaled |D^k at s0|, k = 0..3
  Dominance dominance = Dominance::NotDominant;
  std::vector<Root> roots;
  Rectangle window;
};

/// Builds the closed loop, measures the root multiplicity at s0 and
/// classifies its dominance over a window (a default window is derived
/// from the plant when none is given).
VerifyReport verify_design(const FeedbackPlant& plant, const FeedbackGains& gains, double s0,
                           const Rectangle* window = nullptr, const FindOptions& opts = {});

/// Reduction of the source-driven transmission line to a scalar DDAE with
/// rho = (1 - R0 sqrt(L/C)) / (1 + R0 sqrt(L/C)) and tau = 2 sqrt(L C):
///   a = -(1/C1)(1/R1 + sqrt(C/L)),  b = -(2/C1) sqrt(C/L) rho,
///   c = 1,  d = rho.
DdaeScalar circuit_to_ddae(const CircuitParams& p);

}  // namespace delaymid
