#include "delaymid/quasipoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace delaymid {

namespace {

constexpr double kZeroCoeff = 0.0;

void trim_trailing_zeros(std::vector<double>& coeffs) {
  while (!coeffs.empty() && coeffs.back() == kZeroCoeff) coeffs.pop_back();
}

Complex horner(const std::vector<double>& coeffs, Complex s) {
  Complex acc(0.0, 0.0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
  return acc;
}

// P(x + shift), coefficients ascending, in place.
void taylor_shift(std::vector<double>& c, double shift) {
  if (shift == 0.0 || c.size() < 2) return;
  const int d = static_cast<int>(c.size()) - 1;
  for (int k = 0; k < d; ++k)
    for (int j = d - 1; j >= k; --j) c[j] += shift * c[j + 1];
}

// Parallel chain of nonnegative coefficient bounds: differentiation maps
// c_i -> |lambda| c_i + (i+1) c_{i+1}, so no cancellation ever shrinks it.
// Evaluating it at |s0| (times the true exponential magnitude) bounds what
// the value chain computed with, which is the honest scale for deciding
// that a derivative "vanished".
struct MagnitudeChain {
  std::vector<QuasiTerm> terms;  // coefficients all nonnegative

  explicit MagnitudeChain(const Quasipolynomial& q) {
    for (const auto& t : q.terms()) {
      QuasiTerm mt{t.coeffs, t.lambda};
      for (double& c : mt.coeffs) c = std::abs(c);
      terms.push_back(std::move(mt));
    }
  }

  void differentiate() {
    for (auto& t : terms) {
      std::vector<double> c(t.coeffs.size(), 0.0);
      const double al = std::abs(t.lambda);
      for (std::size_t i = 0; i < t.coeffs.size(); ++i) {
        c[i] += al * t.coeffs[i];
        if (i + 1 < t.coeffs.size()) c[i] += static_cast<double>(i + 1) * t.coeffs[i + 1];
      }
      trim_trailing_zeros(c);
      t.coeffs = std::move(c);
    }
    std::erase_if(terms, [](const QuasiTerm& t) { return t.coeffs.empty(); });
  }

  double log_scale(Complex s0) const {
    const double mod = std::abs(s0);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) {
      double bound = 0.0;
      for (auto it = t.coeffs.rbegin(); it != t.coeffs.rend(); ++it) bound = bound * mod + *it;
      best = std::max(best, (bound > 0.0 ? std::log(bound)
                                         : -std::numeric_limits<double>::infinity()) +
                                t.lambda * s0.real());
    }
    return best;
  }
};

double scaled_residual(const Quasipolynomial& der, const MagnitudeChain& mags, Complex s0) {
  const double val = std::abs(evaluate(der, s0));
  if (val == 0.0) return 0.0;
  return std::exp(std::log(val) - mags.log_scale(s0));
}

}  // namespace

Quasipolynomial::Quasipolynomial(std::vector<QuasiTerm> terms) {
  for (auto& t : terms) {
    if (!std::all_of(t.coeffs.begin(), t.coeffs.end(),
                     [](double v) { return std::isfinite(v); }) ||
        !std::isfinite(t.lambda))
      throw std::invalid_argument("Quasipolynomial: non-finite term data");
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const QuasiTerm& a, const QuasiTerm& b) { return a.lambda < b.lambda; });
  for (auto& t : terms) {
    if (!terms_.empty() && terms_.back().lambda == t.lambda) {
      auto& dst = terms_.back().coeffs;
      if (dst.size() < t.coeffs.size()) dst.resize(t.coeffs.size(), 0.0);
      for (std::size_t i = 0; i < t.coeffs.size(); ++i) dst[i] += t.coeffs[i];
    } else {
      terms_.push_back(std::move(t));
    }
  }
  for (auto& t : terms_) trim_trailing_zeros(t.coeffs);
  std::erase_if(terms_, [](const QuasiTerm& t) { return t.coeffs.empty(); });
}

Complex evaluate(const Quasipolynomial& q, Complex s) {
  Complex acc(0.0, 0.0);
  for (const auto& t : q.terms()) acc += horner(t.coeffs, s) * std::exp(t.lambda * s);
  return acc;
}

Quasipolynomial derivative(const Quasipolynomial& q) {
  std::vector<QuasiTerm> out;
  out.reserve(q.terms().size());
  for (const auto& t : q.terms()) {
    // (p e^{ls})' = (p' + l p) e^{ls}
    std::vector<double> c(t.coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < t.coeffs.size(); ++i) {
      c[i] += t.lambda * t.coeffs[i];
      if (i + 1 < t.coeffs.size()) c[i] += static_cast<double>(i + 1) * t.coeffs[i + 1];
    }
    trim_trailing_zeros(c);
    if (!c.empty()) out.push_back({std::move(c), t.lambda});
  }
  return Quasipolynomial(std::move(out));
}

int degree(const Quasipolynomial& q) {
  if (q.empty()) return -1;
  int d = static_cast<int>(q.terms().size()) - 1;
  for (const auto& t : q.terms()) d += static_cast<int>(t.coeffs.size()) - 1;
  return d;
}

double log_scale_at(const Quasipolynomial& q, Complex s) {
  // Per-term magnitude bound sum_j |c_j| |s|^j, so that cancellation inside
  // a polynomial evaluation counts as smallness relative to the scale.
  const double mod = std::abs(s);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : q.terms()) {
    double bound = 0.0;
    for (auto it = t.coeffs.rbegin(); it != t.coeffs.rend(); ++it)
      bound = bound * mod + std::abs(*it);
    const double lg = (bound > 0.0 ? std::log(bound) : -std::numeric_limits<double>::infinity()) +
                      t.lambda * s.real();
    best = std::max(best, lg);
  }
  return best;
}

double scale_at(const Quasipolynomial& q, Complex s) { return std::exp(log_scale_at(q, s)); }

std::vector<double> derivative_residuals(const Quasipolynomial& q, Complex s0, int k_max) {
  if (q.empty()) throw std::invalid_argument("derivative_residuals: zero quasipolynomial");
  std::vector<double> out;
  Quasipolynomial der = q;
  MagnitudeChain mags(q);
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) {
      der = derivative(der);
      mags.differentiate();
    }
    out.push_back(der.empty() ? 0.0 : scaled_residual(der, mags, s0));
  }
  return out;
}

MultiplicityResult multiplicity_at(const Quasipolynomial& q, Complex s0, double rel_tol) {
  if (rel_tol <= 0.0) throw std::invalid_argument("multiplicity_at: rel_tol must be > 0");
  if (q.empty()) throw std::invalid_argument("multiplicity_at: zero quasipolynomial");
  const int cap = degree(q);
  Quasipolynomial der = q;
  MagnitudeChain mags(q);
  for (int k = 0; k <= cap; ++k) {
    if (k > 0) {
      der = derivative(der);
      mags.differentiate();
    }
    if (der.empty()) break;  // cannot happen before k == cap, by the degree bound
    if (scaled_residual(der, mags, s0) > rel_tol) return {k, false};
  }
  return {cap, true};
}

Quasipolynomial normalize(const Quasipolynomial& q, double s0, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("normalize: tau must be > 0");
  std::vector<QuasiTerm> out;
  out.reserve(q.terms().size());
  for (const auto& t : q.terms()) {
    // tau * p(z/tau + s0) e^{lambda s0} e^{(lambda/tau) z}
    std::vector<double> c = t.coeffs;
    taylor_shift(c, s0);
    const double factor = tau * std::exp(t.lambda * s0);
    double pow_inv_tau = 1.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      c[j] *= factor * pow_inv_tau;
      pow_inv_tau /= tau;
    }
    out.push_back({std::move(c), t.lambda / tau});
  }
  return Quasipolynomial(std::move(out));
}

Quasipolynomial from_ddae_scalar(const DdaeScalar& sys) {
  if (!(sys.tau > 0.0)) throw std::invalid_argument("from_ddae_scalar: tau must be > 0");
  std::vector<QuasiTerm> terms;
  terms.push_back({{-sys.a, 1.0}, 0.0});
  terms.push_back({{sys.a * sys.d - sys.b * sys.c, -sys.d}, -sys.tau});
  return Quasipolynomial(std::move(terms));
}

Quasipolynomial from_retarded(const RetardedSpec& spec) {
  if (!(spec.tau > 0.0)) throw std::invalid_argument("from_retarded: tau must be > 0");
  if (spec.a_coeffs.size() != spec.alpha_coeffs.size() || spec.a_coeffs.empty())
    throw std::invalid_argument("from_retarded: coefficient lists must both have n >= 1 entries");
  std::vector<QuasiTerm> terms;
  std::vector<double> lead = spec.a_coeffs;
  lead.push_back(1.0);
  terms.push_back({std::move(lead), 0.0});
  terms.push_back({spec.alpha_coeffs, -spec.tau});
  return Quasipolynomial(std::move(terms));
}

Complex matrix_char_eval(const MatrixDdae& sys, Complex s) {
  const Eigen::Index dx = sys.dim_x();
  const Eigen::Index dy = sys.dim_y();
  if (sys.A.cols() != dx || sys.C.cols() != dx)
    throw std::invalid_argument("matrix_char_eval: inconsistent state dimensions");
  if (sys.B.size() != sys.taus.size() || sys.D.size() != sys.taus.size() || sys.taus.empty())
    throw std::invalid_argument("matrix_char_eval: need one B, D per delay");

  const Eigen::Index n = dx + dy;
  Eigen::MatrixXcd pencil = Eigen::MatrixXcd::Zero(n, n);
  // s E - Ahat
  pencil.topLeftCorner(dx, dx) =
      s * Eigen::MatrixXcd::Identity(dx, dx) - sys.A.cast<Complex>();
  pencil.bottomLeftCorner(dy, dx) = -sys.C.cast<Complex>();
  pencil.bottomRightCorner(dy, dy) = Eigen::MatrixXcd::Identity(dy, dy);
  // - sum_k e^{-s tau_k} Bhat_k
  for (std::size_t k = 0; k < sys.taus.size(); ++k) {
    if (!(sys.taus[k] > 0.0))
      throw std::invalid_argument("matrix_char_eval: delays must be > 0");
    if (sys.B[k].rows() != dx || sys.B[k].cols() != dy || sys.D[k].rows() != dy ||
        sys.D[k].cols() != dy)
      throw std::invalid_argument("matrix_char_eval: inconsistent delay-block dimensions");
    const Complex w = std::exp(-s * sys.taus[k]);
    pencil.topRightCorner(dx, dy) -= w * sys.B[k].cast<Complex>();
    pencil.bottomRightCorner(dy, dy) -= w * sys.D[k].cast<Complex>();
  }
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(pencil).determinant();
}

MatrixDdae to_matrix_ddae(const DdaeScalar& sys) {
  MatrixDdae m;
  m.A = Eigen::MatrixXd::Constant(1, 1, sys.a);
  m.B = {Eigen::MatrixXd::Constant(1, 1, sys.b)};
  m.C = Eigen::MatrixXd::Constant(1, 1, sys.c);
  m.D = {Eigen::MatrixXd::Constant(1, 1, sys.d)};
  m.taus = {sys.tau};
  return m;
}

}  // namespace delaymid
