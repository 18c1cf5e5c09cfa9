#include "delaymid/feedback.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace delaymid {

namespace {

double row_scale(const FeedbackPlant& p) {
  return std::max({std::abs(p.d1), std::abs(p.d2), std::abs(p.delta1()), std::abs(p.delta2()),
                   1e-300});
}

}  // namespace

const char* to_string(Solvability s) {
  switch (s) {
    case Solvability::Unique: return "Unique";
    case Solvability::InfinitelyMany: return "InfinitelyMany";
    case Solvability::None: return "None";
  }
  return "?";
}

Solvability solvability(const FeedbackPlant& plant) {
  if (!(plant.tau > 0.0)) throw std::invalid_argument("solvability: tau must be > 0");
  const double d1 = plant.d1, d2 = plant.d2;
  const double e1 = plant.delta1(), e2 = plant.delta2();
  const double det = d1 * e2 - d2 * e1;
  const double scale = row_scale(plant);
  if (std::abs(det) > 1e-13 * scale * scale) return Solvability::Unique;
  // Singular rows: solvable iff delta_i = (a - 4/tau) d_i for both i.
  const double mu = plant.a - 4.0 / plant.tau;
  const bool consistent = std::abs(e1 - mu * d1) <= 1e-12 * scale * (1.0 + std::abs(mu)) &&
                          std::abs(e2 - mu * d2) <= 1e-12 * scale * (1.0 + std::abs(mu));
  return consistent ? Solvability::InfinitelyMany : Solvability::None;
}

DesignResult design_gains(const FeedbackPlant& plant) {
  if (!(plant.tau > 0.0)) throw std::invalid_argument("design_gains: tau must be > 0");
  if (plant.a > 0.0 && plant.tau >= 2.0 / plant.a)
    throw NotStabilizableError(
        "design_gains: a - 2/tau >= 0; need a <= 0 or tau < 2/a for a stabilizing root");

  const Solvability solv = solvability(plant);
  if (solv == Solvability::None)
    throw UnsolvableError("design_gains: the gain system has no solution for this plant");

  const double s0 = plant.a - 2.0 / plant.tau;
  const double rhs_scale = std::exp(plant.a * plant.tau - 2.0);  // = e^{s0 tau}
  const double r1 = -rhs_scale;
  const double r2 = (4.0 / plant.tau - plant.a) * rhs_scale;
  const double d1 = plant.d1, d2 = plant.d2;
  const double e1 = plant.delta1(), e2 = plant.delta2();

  FeedbackGains g;
  if (solv == Solvability::Unique) {
    const double det = d1 * e2 - d2 * e1;
    g.k1 = (r1 * e2 - d2 * r2) / det;
    g.k2 = (d1 * r2 - r1 * e1) / det;
  } else {
    // Proportional rows: minimum-norm least-squares solution.
    Eigen::Matrix2d m;
    m << d1, d2, e1, e2;
    Eigen::Vector2d rhs(r1, r2);
    Eigen::Vector2d k = m.completeOrthogonalDecomposition().solve(rhs);
    g.k1 = k(0);
    g.k2 = k(1);
  }
  return {g, s0};
}

Quasipolynomial from_feedback(const FeedbackPlant& plant, const FeedbackGains& gains) {
  DdaeScalar sys;
  sys.a = plant.a;
  sys.tau = plant.tau;
  sys.b = 1.0;
  sys.c = plant.b * (gains.k1 * plant.c1 + gains.k2 * plant.c2);
  sys.d = plant.d1 * gains.k1 + plant.d2 * gains.k2;
  return from_ddae_scalar(sys);
}

VerifyReport verify_design(const FeedbackPlant& plant, const FeedbackGains& gains, double s0,
                           const Rectangle* window, const FindOptions& opts) {
  VerifyReport report;
  report.s0 = s0;
  const Quasipolynomial q = from_feedback(plant, gains);
  report.derivative_residuals = derivative_residuals(q, s0, 3);
  report.multiplicity = multiplicity_at(q, s0);

  if (window) {
    report.window = *window;
  } else {
    const double margin = 0.02 * (1.0 + std::abs(s0));
    const double upper = real_part_upper_bound(q);
    report.window = {s0 - margin, std::max(upper, s0 + 1.0) + 0.1, -40.0 / plant.tau,
                     40.0 / plant.tau};
  }

  if (report.multiplicity.value < 1) {
    // s0 is not even a root; the design failed and dominance is moot.
    report.dominance = Dominance::NotDominant;
    try {
      report.roots = spectral_abscissa(q, report.window.re_min, report.window.im_max, opts).roots;
    } catch (const RootfinderError&) {
      // leave the root list empty; the multiplicity verdict already failed
    }
    return report;
  }

  report.dominance = is_dominant(q, s0, report.window, opts);
  report.roots = find_roots(q, report.window, opts);
  return report;
}

DdaeScalar circuit_to_ddae(const CircuitParams& p) {
  if (!(p.R0 > 0.0 && p.R1 > 0.0 && p.C1 > 0.0 && p.L > 0.0 && p.C > 0.0))
    throw std::invalid_argument("circuit_to_ddae: all parameters must be > 0");
  const double z_ratio = p.R0 * std::sqrt(p.L / p.C);
  const double rho = (1.0 - z_ratio) / (1.0 + z_ratio);
  const double y_ratio = std::sqrt(p.C / p.L);
  DdaeScalar sys;
  sys.a = -(1.0 / p.C1) * (1.0 / p.R1 + y_ratio);
  sys.b = -(2.0 / p.C1) * y_ratio * rho;
  sys.c = 1.0;
  sys.d = rho;
  sys.tau = 2.0 * std::sqrt(p.L * p.C);
  return sys;
}

}  // namespace delaymid
