#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace delaymid {

using Complex = std::complex<double>;

/// One exponential-polynomial term p(s) * exp(lambda * s).
struct QuasiTerm {
  std::vector<double> coeffs;  ///< polynomial coefficients, ascending in degree
  double lambda = 0.0;         ///< exponential shift
};

/// Finite sum of polynomial-times-exponential terms, the characteristic
/// function class of linear delay systems.
///
/// Construction normalizes the term list: terms are sorted by ascending
/// shift, terms sharing a shift are added together, trailing zero
/// coefficients are trimmed and identically-zero polynomials are dropped.
/// Instances are immutable afterwards, so every operation on them is pure
/// and safe to call concurrently.
class Quasipolynomial {
 public:
  Quasipolynomial() = default;
  explicit Quasipolynomial(std::vector<QuasiTerm> terms);

  const std::vector<QuasiTerm>& terms() const { return terms_; }

  /// True for the identically-zero function (no stored terms).
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<QuasiTerm> terms_;
};

/// Scalar delay differential-algebraic model
///   x'(t) = a x(t) + b y(t - tau),  y(t) = c x(t) + d y(t - tau).
struct DdaeScalar {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double tau = 1.0;  ///< must be > 0
};

/// Coefficients of the scalar retarded equation of order n,
///   x^(n) + sum a_k x^(k) + sum alpha_k x^(k)(t - tau) = 0,
/// with k running over 0..n-1 in both sums.
struct RetardedSpec {
  std::vector<double> a_coeffs;      ///< a_0 .. a_{n-1}
  std::vector<double> alpha_coeffs;  ///< alpha_0 .. alpha_{n-1}
  double tau = 1.0;                  ///< must be > 0

  int order() const { return static_cast<int>(a_coeffs.size()); }
};

/// Multi-delay differential-algebraic model with matrix coefficients,
///   x'(t) = A x(t) + sum_k B_k y(t - tau_k),
///   y(t)  = C x(t) + sum_k D_k y(t - tau_k).
struct MatrixDdae {
  Eigen::MatrixXd A;               ///< d_x x d_x
  std::vector<Eigen::MatrixXd> B;  ///< each d_x x d_y
  Eigen::MatrixXd C;               ///< d_y x d_x
  std::vector<Eigen::MatrixXd> D;  ///< each d_y x d_y
  std::vector<double> taus;        ///< strictly positive delays

  Eigen::Index dim_x() const { return A.rows(); }
  Eigen::Index dim_y() const { return C.rows(); }
};

/// Result of a numerical multiplicity estimate.  `degree_capped` is set
/// when every derivative up to the degree stayed below tolerance, in which
/// case the degree bound itself is reported as the multiplicity.
struct MultiplicityResult {
  int value = 0;
  bool degree_capped = false;
};

/// Evaluates q at s; each polynomial factor is evaluated by Horner's
/// scheme.  May overflow to infinity for large |Re(lambda * s)|.
Complex evaluate(const Quasipolynomial& q, Complex s);

/// Term-wise derivative (p e^{ls})' = (p' + l p) e^{ls}; terms whose
/// polynomial vanishes are dropped.
Quasipolynomial derivative(const Quasipolynomial& q);

/// Degree ell + sum of polynomial degrees, where ell + 1 is the number of
/// terms.  This caps the multiplicity of any root.  Returns -1 for the
/// zero quasipolynomial.
int degree(const Quasipolynomial& q);

/// log(max term magnitude) of q at s, the cancellation scale used for
/// relative residuals.  Safe from overflow: computed in log space.
double log_scale_at(const Quasipolynomial& q, Complex s);

/// exp(log_scale_at); may be infinite.
double scale_at(const Quasipolynomial& q, Complex s);

/// Scaled residuals |q^(k)(s0)| / S_k for k = 0..k_max.  S_k bounds the
/// k-th derivative evaluation with all cancellation removed (absolute
/// values propagated through both differentiation and Horner), so a
/// residual of a few machine epsilons certifies a vanishing derivative.
std::vector<double> derivative_residuals(const Quasipolynomial& q, Complex s0, int k_max);

/// Smallest k whose scaled derivative residual at s0 exceeds rel_tol.
/// Never exceeds degree(q); the flag marks hitting that bound.
MultiplicityResult multiplicity_at(const Quasipolynomial& q, Complex s0,
                                   double rel_tol = 1e-8);

/// Spectrum translation and scaling z = tau * (s - s0): returns the
/// quasipolynomial z -> tau * q(z / tau + s0).  Roots correspond under the
/// same change of variables.
Quasipolynomial normalize(const Quasipolynomial& q, double s0, double tau);

/// Characteristic quasipolynomial of the scalar DDAE:
///   s - a - e^{-s tau} (s d - a d + b c).
Quasipolynomial from_ddae_scalar(const DdaeScalar& sys);

/// Characteristic quasipolynomial of the order-n retarded equation:
///   s^n + sum a_k s^k + e^{-s tau} sum alpha_k s^k.
Quasipolynomial from_retarded(const RetardedSpec& spec);

/// Characteristic function of the matrix DDAE at s: the determinant of the
/// (d_x + d_y)-square pencil
///   s E - Ahat - sum_k e^{-s tau_k} Bhat_k
/// with E = diag(I, 0), Ahat = [[A, 0], [C, -I]], Bhat_k = [[0, B_k],
/// [0, D_k]], computed by LU factorization with partial pivoting.
Complex matrix_char_eval(const MatrixDdae& sys, Complex s);

/// Embeds the scalar DDAE as a 1 + 1 matrix system (handy for testing the
/// determinant path against the closed form).
MatrixDdae to_matrix_ddae(const DdaeScalar& sys);

}  // namespace delaymid
