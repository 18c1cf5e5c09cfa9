#pragma once

#include <optional>
#include <vector>

#include "delaymid/quasipoly.hpp"
#include "delaymid/rootfinder.hpp"

namespace delaymid {

/// Coefficient relations that give the scalar DDAE a real root s0 of
/// maximal multiplicity 3:
///   a = s0 + 2/tau,  d = -e^{s0 tau},  b c = -(4/tau) e^{s0 tau}.
struct MidDdaeConditions {
  double a = 0.0;
  double d = 0.0;
  double bc = 0.0;
  double s0 = 0.0;
  double tau = 1.0;
};

/// Ascending nonnegative solutions of tan(xi) = xi, with xi_0 = 0 and
/// xi_k in (k pi, k pi + pi/2) for k >= 1.
struct XiLattice {
  std::vector<double> xis;
};

/// Retarded coefficients (a_k, alpha_k) that make s0 a root of maximal
/// multiplicity 2n of the order-n characteristic quasipolynomial.
/// Supported for n <= 20; combinatorial factors are formed exactly as
/// integers before conversion to double.
RetardedSpec retarded_mid(int n, double s0, double tau);

/// The unique (a, d, bc) making s0 a triple root of the scalar DDAE's
/// characteristic quasipolynomial with delay tau.
MidDdaeConditions ddae_mid(double s0, double tau);

/// Tests whether sys satisfies the maximal-multiplicity relations; if so
/// returns the placed root s0 = a - 2/tau.
std::optional<double> ddae_mid_inverse(const DdaeScalar& sys, double tol = 1e-9);

/// xi_0 .. xi_K by bisection of sin(xi) - xi cos(xi) followed by Newton
/// polish.  The sine form shares its roots with tan(xi) = xi on each
/// bracket but has no poles.
XiLattice xi_roots(int K);

/// Full root set of the maximal-multiplicity DDAE quasipolynomial:
/// { s0 + i (2/tau) xi_k : k = -K..K }, ordered by imaginary part.
std::vector<Complex> ddae_root_lattice(double s0, double tau, int K);

/// The normalized triple-root quasipolynomial z - 2 + e^{-z} (z + 2).
Complex normalized_delta(Complex z);

/// Builds a concrete scalar DDAE from the triple-root relations using the
/// normalization b = 1, c = bc.  Only the product b*c matters spectrally.
DdaeScalar to_ddae_scalar(const MidDdaeConditions& cond, double b = 1.0);

/// | delta_hat(z) - z^3 * Q(z) | where Q is the Gauss-Legendre quadrature
/// of integral_0^1 t (1-t) e^{-z t} dt on quad_order nodes.  The cubic
/// factorization holds exactly, so this measures quadrature + evaluation
/// error only.
double factorization_residual(Complex z, int quad_order = 32);

/// Scaled defect of the reflection identity delta_hat(-z) = -e^z delta_hat(z):
/// | delta_hat(-z) + e^z delta_hat(z) | / (1 + |e^z delta_hat(z)|).
double symmetry_residual(Complex z);

/// True iff every root lying off the imaginary axis (|Re| > 1e-8) has
/// |Im| < 2, the a-priori band for off-axis roots of delta_hat.
bool offaxis_band_check(const std::vector<Root>& roots);

/// Two independent predicates for "i zeta is a root of delta_hat": direct
/// evaluation, and membership of zeta/2 in the tan(xi) = xi lattice.
struct ImaginaryRootCheck {
  bool delta_root = false;
  bool xi_member = false;
  bool consistent() const { return delta_root == xi_member; }
};

ImaginaryRootCheck imaginary_root_test(double zeta, double tol = 1e-9);

}  // namespace delaymid
