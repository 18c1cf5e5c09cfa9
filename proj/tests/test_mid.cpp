#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "delaymid/mid.hpp"
#include "delaymid/quasipoly.hpp"
#include "delaymid/rootfinder.hpp"
#include "helpers.hpp"

using namespace delaymid;
using testutil::Rng;

namespace {
constexpr double kPi = std::numbers::pi;

// Scaled residual of the k-th derivative at s0.
double deriv_residual(const Quasipolynomial& q, double s0, int k) {
  return derivative_residuals(q, {s0, 0.0}, k).back();
}
}  // namespace

TEST_CASE("retarded_mid: order 1 closed forms") {
  const RetardedSpec unit = retarded_mid(1, 0.0, 1.0);
  CHECK(unit.a_coeffs[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(unit.alpha_coeffs[0] == doctest::Approx(1.0).epsilon(1e-15));

  Rng rng(21);
  for (int i = 0; i < 25; ++i) {
    const double s0 = rng.uniform(-2.0, 2.0);
    const double tau = rng.uniform(0.1, 5.0);
    const RetardedSpec spec = retarded_mid(1, s0, tau);
    CHECK(spec.a_coeffs[0] ==
          doctest::Approx(-s0 - 1.0 / tau).epsilon(1e-12));
    CHECK(spec.alpha_coeffs[0] ==
          doctest::Approx(std::exp(s0 * tau) / tau).epsilon(1e-12));
  }
}

TEST_CASE("retarded_mid: derivatives vanish through order 2n-1") {
  Rng rng(22);
  for (int n = 1; n <= 6; ++n) {
    for (int i = 0; i < 8; ++i) {
      const double s0 = rng.uniform(-2.0, 2.0);
      const double tau = rng.uniform(0.1, 5.0);
      const Quasipolynomial q = from_retarded(retarded_mid(n, s0, tau));
      for (int k = 0; k < 2 * n; ++k) CHECK(deriv_residual(q, s0, k) < 1e-8);
      CHECK(deriv_residual(q, s0, 2 * n) > 1e-6);
      CHECK(multiplicity_at(q, {s0, 0.0}).value == 2 * n);
    }
  }
}

TEST_CASE("retarded_mid: bounds on n") {
  CHECK_THROWS_AS(retarded_mid(0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(retarded_mid(21, 0.0, 1.0), std::overflow_error);
  const RetardedSpec spec = retarded_mid(20, 0.1, 1.3);
  for (double v : spec.a_coeffs) CHECK(std::isfinite(v));
  for (double v : spec.alpha_coeffs) CHECK(std::isfinite(v));
}

TEST_CASE("ddae_mid: reference values") {
  const MidDdaeConditions unit = ddae_mid(0.0, 1.0);
  CHECK(std::abs(unit.a - 2.0) < 1e-15);
  CHECK(std::abs(unit.d + 1.0) < 1e-15);
  CHECK(std::abs(unit.bc + 4.0) < 1e-15);

  // s0 = -1/3, tau = 3/2: a = 1, d = -e^{-1/2}, bc = -(8/3) e^{-1/2}
  const MidDdaeConditions c = ddae_mid(-1.0 / 3.0, 1.5);
  const double e = std::exp(-0.5);
  CHECK(c.a == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.d == doctest::Approx(-e).epsilon(1e-15));
  CHECK(c.bc == doctest::Approx(-(8.0 / 3.0) * e).epsilon(1e-15));
}

TEST_CASE("ddae_mid: placed root has multiplicity 3") {
  Rng rng(23);
  for (int i = 0; i < 30; ++i) {
    const double s0 = rng.uniform(-2.0, 1.0);
    const double tau = rng.uniform(0.2, 4.0);
    const Quasipolynomial q = from_ddae_scalar(to_ddae_scalar(ddae_mid(s0, tau)));
    CHECK(multiplicity_at(q, {s0, 0.0}).value == 3);
  }
}

TEST_CASE("ddae_mid_inverse") {
  CHECK(ddae_mid_inverse({2.0, -4.0, 1.0, -1.0, 1.0}).value() == doctest::Approx(0.0));
  CHECK_FALSE(ddae_mid_inverse({2.0, -4.0, 1.0, -1.0, 2.0}).has_value());

  Rng rng(24);
  for (int i = 0; i < 30; ++i) {
    const double s0 = rng.uniform(-2.0, 1.0);
    const double tau = rng.uniform(0.2, 4.0);
    const auto round_trip = ddae_mid_inverse(to_ddae_scalar(ddae_mid(s0, tau)));
    REQUIRE(round_trip.has_value());
    CHECK(*round_trip == doctest::Approx(s0).epsilon(1e-12));
  }
}

TEST_CASE("xi_roots: values, bracket, residual") {
  const XiLattice lattice = xi_roots(100);
  REQUIRE(lattice.xis.size() == 101);
  CHECK(lattice.xis[0] == 0.0);
  CHECK(lattice.xis[1] == doctest::Approx(4.493409457909064).epsilon(1e-14));
  for (int k = 1; k <= 100; ++k) {
    const double xi = lattice.xis[k];
    CHECK(xi == doctest::Approx(testutil::xi_oracle(k)).epsilon(1e-13));
    CHECK(xi > k * kPi);
    CHECK(xi < k * kPi + 0.5 * kPi);
    CHECK(std::abs(std::sin(xi) - xi * std::cos(xi)) < 1e-13 * (1.0 + xi));
  }
  CHECK(std::abs(lattice.xis[40] - 40.0 * kPi - 0.5 * kPi) < 0.01);
}

TEST_CASE("ddae_root_lattice") {
  const double xi1 = testutil::xi_oracle(1);
  const auto pts = ddae_root_lattice(0.0, 1.0, 1);
  REQUIRE(pts.size() == 3);
  CHECK(std::abs(pts[0] - Complex(0.0, -2.0 * xi1)) < 1e-13);
  CHECK(std::abs(pts[1]) == 0.0);
  CHECK(std::abs(pts[2] - Complex(0.0, 2.0 * xi1)) < 1e-13);

  for (auto [s0, tau] : {std::pair{0.0, 1.0}, std::pair{-1.0 / 3, 1.5}, std::pair{0.5, 0.8}}) {
    const Quasipolynomial q = from_ddae_scalar(to_ddae_scalar(ddae_mid(s0, tau)));
    for (const Complex z : ddae_root_lattice(s0, tau, 5))
      CHECK(std::abs(evaluate(q, z)) < 1e-9);
  }
}

TEST_CASE("ddae_root_lattice agrees with the root finder") {
  const double s0 = -0.25;
  const double tau = 1.3;
  const int K = 4;
  const auto lattice = ddae_root_lattice(s0, tau, K);
  const double im_max = 2.0 * testutil::xi_oracle(K) / tau + 1.0;
  const Quasipolynomial q = from_ddae_scalar(to_ddae_scalar(ddae_mid(s0, tau)));
  const auto found = find_roots(q, {s0 - 1.0, s0 + 1.0, -im_max, im_max});

  // One-to-one: multiplicity 3 at s0, 1 at each lattice point.
  int matched = 0;
  for (const Root& r : found) {
    bool hit = false;
    for (const Complex z : lattice)
      if (std::abs(r.location - z) < 1e-8) hit = true;
    CHECK(hit);
    matched += r.multiplicity;
  }
  CHECK(found.size() == lattice.size());
  CHECK(matched == static_cast<int>(lattice.size()) + 2);  // the triple root
}

TEST_CASE("normalized_delta") {
  CHECK(std::abs(normalized_delta({0.0, 0.0})) == 0.0);
  CHECK(std::abs(normalized_delta({0.0, 2.0 * testutil::xi_oracle(1)})) < 1e-10);
  CHECK(normalized_delta({1.0, 0.0}).real() ==
        doctest::Approx(-1.0 + 3.0 / std::exp(1.0)).epsilon(1e-15));

  Rng rng(25);
  const Quasipolynomial dh = testutil::delta_hat();
  for (int i = 0; i < 20; ++i) {
    const Complex z = rng.complex_in(5.0);
    CHECK(std::abs(normalized_delta(z) - evaluate(dh, z)) < 1e-12 * (1.0 + std::abs(z)));
  }
}

TEST_CASE("factorization_residual") {
  CHECK(factorization_residual({0.0, 0.0}) == 0.0);
  CHECK(factorization_residual({5.0, 0.0}) < 1e-12);

  // delta_hat(z)/z^3 -> integral of t(1-t) = 1/6 as z -> 0
  const Complex z(1e-3, 0.0);
  CHECK(std::abs(normalized_delta(z) / (z * z * z) - 1.0 / 6.0) < 1e-3);

  for (double re = -10.0; re <= 10.0; re += 2.0)
    for (double im = -10.0; im <= 10.0; im += 2.0)
      CHECK(factorization_residual({re, im}, 32) < 1e-10);

  // Quadrature order sweep tightens the residual.
  const Complex hard(-9.0, 9.0);
  CHECK(factorization_residual(hard, 8) > factorization_residual(hard, 16));
  CHECK(factorization_residual(hard, 16) > factorization_residual(hard, 32));
  CHECK_THROWS_AS(factorization_residual({1.0, 0.0}, 4), std::invalid_argument);
}

TEST_CASE("symmetry_residual") {
  CHECK(symmetry_residual({0.0, 0.0}) == 0.0);
  Rng rng(26);
  for (int i = 0; i < 1000; ++i) {
    const Complex z = rng.complex_in(20.0 / std::numbers::sqrt2);
    CHECK(symmetry_residual(z) < 1e-12);
  }
  // Real coefficients force conjugate symmetry as well.
  for (int i = 0; i < 20; ++i) {
    const Complex z = rng.complex_in(5.0);
    CHECK(std::abs(normalized_delta(std::conj(z)) - std::conj(normalized_delta(z))) <
          1e-13 * (1.0 + std::abs(normalized_delta(z))));
  }
}

TEST_CASE("offaxis_band_check") {
  const auto roots = find_roots(testutil::delta_hat(), {-4.0, 4.0, -30.0, 30.0});
  CHECK(offaxis_band_check(roots));  // vacuous: no off-axis roots exist
  CHECK_FALSE(offaxis_band_check({{{1.0, 3.0}, 1, 0.0}}));
  CHECK(offaxis_band_check({{{1.0, 1.0}, 1, 0.0}}));
}

TEST_CASE("imaginary_root_test") {
  const ImaginaryRootCheck at_root = imaginary_root_test(2.0 * testutil::xi_oracle(1));
  CHECK(at_root.delta_root);
  CHECK(at_root.xi_member);

  const ImaginaryRootCheck at_pi = imaginary_root_test(kPi);
  CHECK_FALSE(at_pi.delta_root);
  CHECK_FALSE(at_pi.xi_member);

  const ImaginaryRootCheck at_zero = imaginary_root_test(0.0);
  CHECK(at_zero.delta_root);
  CHECK(at_zero.xi_member);

  Rng rng(27);
  for (int i = 0; i < 200; ++i) CHECK(imaginary_root_test(rng.uniform(0.0, 30.0)).consistent());
}
