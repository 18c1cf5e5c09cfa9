#include "delaymid/mid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace delaymid {

namespace {

constexpr double kPi = std::numbers::pi;

// Exact integer combinatorics for the maximal-multiplicity coefficient
// formulas.  Each factor stays within 128 bits for n <= 20; rounding only
// happens at the final conversion to double.
double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  unsigned __int128 num = 1;
  for (int i = 0; i < k; ++i) {
    num *= static_cast<unsigned>(n - i);
    num /= static_cast<unsigned>(i + 1);  // exact: prefix products are binomials
  }
  return static_cast<double>(num);
}

// lo * (lo+1) * ... * hi, with empty products equal to 1.
double rising(int lo, int hi) {
  unsigned __int128 p = 1;
  for (int i = std::max(lo, 1); i <= hi; ++i) p *= static_cast<unsigned>(i);
  return static_cast<double>(p);
}

double sign_pow(int e) { return (e % 2 == 0) ? 1.0 : -1.0; }

// sin(x) - x cos(x), the pole-free form of tan(x) = x.
double xi_equation(double x) { return std::sin(x) - x * std::cos(x); }

// The factorization check works on values up to e^{10} * |z|^3 over the
// tested grid; long double keeps its roundoff comfortably below the 1e-10
// budget.
using CLD = std::complex<long double>;

CLD normalized_delta_ld(CLD z) { return z - 2.0L + std::exp(-z) * (z + 2.0L); }

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_01(int order, std::vector<long double>& nodes,
                       std::vector<long double>& weights) {
  nodes.resize(order);
  weights.resize(order);
  const long double pi_ld = 3.14159265358979323846264338327950288L;
  for (int i = 0; i < order; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    long double x = std::cos(pi_ld * (i + 0.75L) / (order + 0.5L));
    long double dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    nodes[i] = 0.5L * (1.0L - x);
    weights[i] = 1.0L / ((1.0L - x * x) * dp * dp);
  }
}

}  // namespace

RetardedSpec retarded_mid(int n, double s0, double tau) {
  if (n < 1) throw std::invalid_argument("retarded_mid: n must be >= 1");
  if (n > 20) throw std::overflow_error("retarded_mid: combinatorial factors overflow beyond n = 20");
  if (!(tau > 0.0)) throw std::invalid_argument("retarded_mid: tau must be > 0");

  RetardedSpec spec;
  spec.tau = tau;
  spec.a_coeffs.resize(n);
  spec.alpha_coeffs.resize(n);
  const double exp_s0tau = std::exp(s0 * tau);

  for (int k = 0; k < n; ++k) {
    double a = binom(n, k) * std::pow(-s0, n - k);
    double sum = 0.0;
    for (int j = k; j <= n - 1; ++j) {
      // n!/j! exact, then binomials
      sum += binom(j, k) * binom(2 * n - j - 1, n - 1) * rising(j + 1, n) *
             std::pow(s0, j - k) / std::pow(tau, n - j);
    }
    a += sign_pow(n - k) * sum;
    spec.a_coeffs[k] = a;

    double asum = 0.0;
    for (int j = k; j <= n - 1; ++j) {
      // (2n-j-1)! / (k! (j-k)! (n-j-1)!)
      //   = C(j,k) * C(2n-j-1, j) * (n-j)(n-j+1)...(2n-2j-1)
      const double factor =
          binom(j, k) * binom(2 * n - j - 1, j) * rising(n - j, 2 * n - 2 * j - 1);
      asum += sign_pow(j - k) * factor * std::pow(s0, j - k) / std::pow(tau, n - j);
    }
    spec.alpha_coeffs[k] = sign_pow(n - 1) * exp_s0tau * asum;
  }
  return spec;
}

MidDdaeConditions ddae_mid(double s0, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("ddae_mid: tau must be > 0");
  const double e = std::exp(s0 * tau);
  return {s0 + 2.0 / tau, -e, -(4.0 / tau) * e, s0, tau};
}

std::optional<double> ddae_mid_inverse(const DdaeScalar& sys, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("ddae_mid_inverse: tol must be > 0");
  if (!(sys.tau > 0.0)) throw std::invalid_argument("ddae_mid_inverse: tau must be > 0");
  const double s0 = sys.a - 2.0 / sys.tau;
  const double e = std::exp(s0 * sys.tau);
  const bool ok = std::abs(sys.d + e) < tol * e &&
                  std::abs(sys.b * sys.c + (4.0 / sys.tau) * e) < tol * e;
  if (!ok) return std::nullopt;
  return s0;
}

XiLattice xi_roots(int K) {
  if (K < 1) throw std::invalid_argument("xi_roots: K must be >= 1");
  XiLattice lattice;
  lattice.xis.reserve(K + 1);
  lattice.xis.push_back(0.0);
  for (int k = 1; k <= K; ++k) {
    // xi_k is bracketed in (k pi, k pi + pi/2): the sine form has opposite
    // signs at the ends and no other zero in between.
    double lo = k * kPi;
    double hi = k * kPi + 0.5 * kPi;
    double flo = xi_equation(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = xi_equation(mid);
      if ((flo <= 0.0) == (fmid <= 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
      }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
      const double g = xi_equation(x);
      const double dg = x * std::sin(x);
      if (dg == 0.0) break;
      const double next = x - g / dg;
      if (next > k * kPi && next < k * kPi + 0.5 * kPi) x = next;
    }
    lattice.xis.push_back(x);
  }
  return lattice;
}

std::vector<Complex> ddae_root_lattice(double s0, double tau, int K) {
  if (!(tau > 0.0)) throw std::invalid_argument("ddae_root_lattice: tau must be > 0");
  const XiLattice lattice = xi_roots(K);
  std::vector<Complex> roots;
  roots.reserve(2 * K + 1);
  for (int k = K; k >= 1; --k) roots.emplace_back(s0, -2.0 * lattice.xis[k] / tau);
  roots.emplace_back(s0, 0.0);
  for (int k = 1; k <= K; ++k) roots.emplace_back(s0, 2.0 * lattice.xis[k] / tau);
  return roots;
}

Complex normalized_delta(Complex z) { return z - 2.0 + std::exp(-z) * (z + 2.0); }

DdaeScalar to_ddae_scalar(const MidDdaeConditions& cond, double b) {
  if (b == 0.0) throw std::invalid_argument("to_ddae_scalar: b must be nonzero");
  return {cond.a, b, cond.bc / b, cond.d, cond.tau};
}

double factorization_residual(Complex z, int quad_order) {
  if (quad_order < 8) throw std::invalid_argument("factorization_residual: quad_order must be >= 8");
  std::vector<long double> nodes, weights;
  gauss_legendre_01(quad_order, nodes, weights);
  const CLD zl(z.real(), z.imag());
  CLD integral(0.0L, 0.0L);
  for (int i = 0; i < quad_order; ++i) {
    const long double t = nodes[i];
    integral += weights[i] * t * (1.0L - t) * std::exp(-zl * t);
  }
  return static_cast<double>(std::abs(normalized_delta_ld(zl) - zl * zl * zl * integral));
}

double symmetry_residual(Complex z) {
  const Complex rhs = std::exp(z) * normalized_delta(z);
  return std::abs(normalized_delta(-z) + rhs) / (1.0 + std::abs(rhs));
}

bool offaxis_band_check(const std::vector<Root>& roots) {
  for (const Root& r : roots)
    if (std::abs(r.location.real()) > 1e-8 && std::abs(r.location.imag()) >= 2.0) return false;
  return true;
}

ImaginaryRootCheck imaginary_root_test(double zeta, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("imaginary_root_test: tol must be > 0");
  ImaginaryRootCheck check;
  const double scale = 1.0 + std::abs(zeta);
  check.delta_root = std::abs(normalized_delta(Complex(0.0, zeta))) < tol * scale;
  const double half = 0.5 * zeta;
  check.xi_member = std::abs(xi_equation(half)) < tol * (1.0 + std::abs(half));
  return check;
}

}  // namespace delaymid
