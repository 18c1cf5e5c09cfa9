#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "delaymid/quasipoly.hpp"

namespace testutil {

using delaymid::Complex;
using delaymid::QuasiTerm;
using delaymid::Quasipolynomial;

// z - 2 + e^{-z} (z + 2), the normalized triple-root quasipolynomial.
inline Quasipolynomial delta_hat() {
  return Quasipolynomial({{{-2.0, 1.0}, 0.0}, {{2.0, 1.0}, -1.0}});
}

// Independent oracle for the k-th positive solution of tan(x) = x: plain
// bisection of sin(x) - x cos(x) on (k pi, k pi + pi/2), no Newton.
inline double xi_oracle(int k) {
  const double pi = std::numbers::pi;
  double lo = k * pi;
  double hi = k * pi + 0.5 * pi;
  auto g = [](double x) { return std::sin(x) - x * std::cos(x); };
  double flo = g(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = g(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Deterministic uniform sampling for property tests.
struct Rng {
  std::mt19937 gen;
  explicit Rng(unsigned seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  Complex complex_in(double box) { return {uniform(-box, box), uniform(-box, box)}; }
};

// Random quasipolynomial with distinct shifts in [-3, 0] and bounded total
// degree; the leading coefficient of each term is kept away from zero.
inline Quasipolynomial random_quasipolynomial(Rng& rng, int max_terms = 3, int max_deg = 3) {
  const int nterms = rng.uniform_int(1, max_terms);
  std::vector<QuasiTerm> terms;
  for (int k = 0; k < nterms; ++k) {
    QuasiTerm t;
    const int deg = rng.uniform_int(0, max_deg);
    for (int j = 0; j <= deg; ++j) t.coeffs.push_back(rng.uniform(-2.0, 2.0));
    if (std::abs(t.coeffs.back()) < 0.1) t.coeffs.back() = t.coeffs.back() < 0 ? -0.5 : 0.5;
    t.lambda = (k == 0) ? 0.0 : rng.uniform(-3.0, -0.1) - 0.3 * k;
    terms.push_back(std::move(t));
  }
  return Quasipolynomial(std::move(terms));
}

}  // namespace testutil
