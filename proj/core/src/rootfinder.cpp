#include "delaymid/rootfinder.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

namespace delaymid {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double wrap_angle(double d) { return std::remainder(d, kTwoPi); }

// Boundary walk state shared by the winding-number recursion.
struct BoundaryWalk {
  const AnalyticFn& f;
  double eps_abs;  // |f| below this on the boundary counts as a boundary root
  int max_refine;

  Complex probe(Complex z) const {
    const Complex v = f.value(z);
    if (!finite(v)) throw NonConvergentError("count_roots: evaluator returned non-finite value");
    if (std::abs(v) < eps_abs) throw BoundaryRootError("count_roots: |f| vanishes on the boundary");
    return v;
  }

  // A half-segment is trusted when its wrapped jump is at most pi/2 and
  // the endpoint magnitudes are comparable.  A sharp |f| dip flags a
  // nearby zero, where the phase can spin through whole turns between
  // samples and a wrapped difference alone would alias.
  static bool half_ok(double d, Complex fa, Complex fb) {
    const double ma = std::abs(fa);
    const double mb = std::abs(fb);
    const double ratio = ma > mb ? ma / mb : mb / ma;
    return std::abs(d) <= 0.5 * kPi && ratio <= 2.5;
  }

  // Accumulated phase change along [za, zb].  Acceptance is always
  // midpoint-verified: samples straddling a dip symmetrically have
  // comparable magnitudes and a small wrapped difference even though the
  // phase wound a full turn, but then the midpoint sits in the dip and
  // fails the magnitude test.
  double track(Complex za, Complex zb, Complex fa, Complex fb, int depth) const {
    if (std::abs(zb - za) <= 1e-15 * (1.0 + std::abs(za)))
      return wrap_angle(std::arg(fb) - std::arg(fa));
    const Complex zm = 0.5 * (za + zb);
    const Complex fm = probe(zm);
    const double d1 = wrap_angle(std::arg(fm) - std::arg(fa));
    const double d2 = wrap_angle(std::arg(fb) - std::arg(fm));
    if (half_ok(d1, fa, fm) && half_ok(d2, fm, fb)) return d1 + d2;
    if (depth <= 0)
      throw NonConvergentError("count_roots: phase tracking exceeded refinement depth");
    return track(za, zm, fa, fm, depth - 1) + track(zm, zb, fm, fb, depth - 1);
  }
};

std::vector<Complex> boundary_polyline(const Rectangle& r, double phase_scale) {
  const Complex corners[4] = {{r.re_min, r.im_min},
                              {r.re_max, r.im_min},
                              {r.re_max, r.im_max},
                              {r.re_min, r.im_max}};
  std::vector<Complex> pts;
  for (int e = 0; e < 4; ++e) {
    const Complex a = corners[e];
    const Complex b = corners[(e + 1) % 4];
    const double len = std::abs(b - a);
    int n = 8 + static_cast<int>(std::ceil(len * std::max(phase_scale, 0.0) / 0.9));
    n = std::min(n, 20000);
    for (int i = 0; i < n; ++i)
      pts.push_back(a + (b - a) * (static_cast<double>(i) / n));
  }
  return pts;
}

int winding_count(const AnalyticFn& f, const Rectangle& rect, const FindOptions& opts) {
  if (!rect.valid()) throw std::invalid_argument("count_roots: invalid rectangle");
  const std::vector<Complex> pts = boundary_polyline(rect, f.phase_scale);

  std::vector<Complex> vals(pts.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    vals[i] = f.value(pts[i]);
    if (!finite(vals[i]))
      throw NonConvergentError("count_roots: evaluator returned non-finite value");
    scale = std::max(scale, std::abs(vals[i]));
  }
  if (scale == 0.0) throw BoundaryRootError("count_roots: f vanishes on the whole boundary");

  BoundaryWalk walk{f, opts.boundary_eps_rel * scale, 60};
  for (const Complex v : vals)
    if (std::abs(v) < walk.eps_abs)
      throw BoundaryRootError("count_roots: |f| vanishes on the boundary");

  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t j = (i + 1) % pts.size();
    total += walk.track(pts[i], pts[j], vals[i], vals[j], walk.max_refine);
  }
  const double w = total / kTwoPi;
  const double rounded = std::round(w);
  if (std::abs(w - rounded) > 0.2 || rounded < 0.0)
    throw NonConvergentError("count_roots: winding number did not settle near an integer");
  return static_cast<int>(rounded);
}

struct Candidate {
  Complex location;
  int multiplicity;
  double residual;
};

struct Finder {
  const AnalyticFn& f;
  FindOptions opts;
  int parallel_depth;

  // Deterministic split offsets tried when a quadrisection line lands on a
  // root (detected by boundary errors or a count mismatch).
  static constexpr double kSplitFractions[7] = {0.5,          0.5 + 0.1137, 0.5 - 0.1137,
                                                0.5 + 0.2071, 0.5 - 0.2071, 0.5 + 0.3119,
                                                0.5 - 0.3119};

  // Newton iteration for a simple root of `value` (with `deriv`), started
  // from the box center.  On success stores the refined point in z_out.
  bool newton_simple(const Rectangle& box, const std::function<Complex(Complex)>& value,
                     const std::function<Complex(Complex)>& deriv, Complex& z_out) const {
    Complex z = box.center();
    const double span = std::max(box.width(), box.height());
    const double step_tol =
        std::max(1e-3 * opts.tol, 8.0 * std::numeric_limits<double>::epsilon());
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
      const Complex fz = value(z);
      if (!finite(fz)) return false;
      if (fz == Complex(0.0, 0.0)) {
        z_out = z;
        return true;
      }
      const Complex dz = deriv(z);
      if (!finite(dz) || dz == Complex(0.0, 0.0)) return false;
      const Complex step = fz / dz;
      if (!finite(step)) return false;
      z -= step;
      if (std::abs(z - box.center()) > 2.0 * span) return false;  // escaped
      const double mag = std::abs(step);
      if (mag <= step_tol * (1.0 + std::abs(z)) ||
          (it > 8 && mag >= 0.5 * last_step && mag <= 1e-7 * (1.0 + std::abs(z)))) {
        z_out = z;
        return true;  // converged, or stagnating at the evaluation noise floor
      }
      last_step = mag;
    }
    return false;
  }

  bool inside(const Rectangle& box, Complex z) const {
    const double slack = 1e-9 * (1.0 + std::max(box.width(), box.height()));
    return z.real() >= box.re_min - slack && z.real() <= box.re_max + slack &&
           z.imag() >= box.im_min - slack && z.imag() <= box.im_max + slack;
  }

  bool refine_newton(const Rectangle& box, int mult, std::vector<Candidate>& out) const {
    Complex z;
    if (mult == 1) {
      if (!newton_simple(box, f.value, f.derivative, z)) return false;
      if (!inside(box, z)) return false;
      out.push_back({z, 1, std::abs(f.value(z))});
      return true;
    }

    if (f.kth_derivative && f.local_multiplicity) {
      // A true m-fold root cannot exceed the available derivative order
      // (for a quasipolynomial, its degree); larger counts mean distinct
      // roots and the box must be subdivided instead.
      if (mult > f.derivative_orders) return false;
      const int k = mult - 1;
      auto value = [this, k](Complex s) { return f.kth_derivative(k, s); };
      auto deriv = [this, k](Complex s) { return f.kth_derivative(k + 1, s); };
      if (!newton_simple(box, value, deriv, z)) return false;
      if (!inside(box, z)) return false;
      // The candidate explains the box's whole root content only if the
      // local multiplicity matches the winding count.
      if (f.local_multiplicity(z, 1e-8) != mult) return false;
      out.push_back({z, mult, std::abs(f.value(z))});
      return true;
    }

    // No higher derivatives available: multiplicity-corrected Newton on f,
    // accurate only to the eps^(1/m) cancellation floor.
    Complex zz = box.center();
    const double span = std::max(box.width(), box.height());
    bool converged = false;
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
      const Complex fz = f.value(zz);
      const Complex dz = f.derivative(zz);
      if (!finite(fz) || !finite(dz)) return false;
      if (fz == Complex(0.0, 0.0)) {
        converged = true;
        break;
      }
      const Complex step = static_cast<double>(mult) * fz / dz;
      if (!finite(step)) return false;
      zz -= step;
      if (std::abs(zz - box.center()) > 2.0 * span) return false;
      const double mag = std::abs(step);
      if (mag <= 1e-3 * opts.tol * (1.0 + std::abs(zz)) ||
          (it > 8 && mag >= 0.5 * last_step && mag <= 1e-4 * (1.0 + std::abs(zz)))) {
        converged = true;
        break;
      }
      last_step = mag;
    }
    if (!converged || !inside(box, zz)) return false;
    // Validate against a winding count on a circle wide enough to rise
    // above the cancellation noise.
    const double r = std::max({2.0 * opts.tol, 10.0 * last_step, 1e-12 * (1.0 + std::abs(zz))});
    const Rectangle probe{zz.real() - r, zz.real() + r, zz.imag() - r, zz.imag() + r};
    try {
      if (winding_count(f, probe, opts) != mult) return false;
    } catch (const RootfinderError&) {
      return false;
    }
    out.push_back({zz, mult, std::abs(f.value(zz))});
    return true;
  }

  std::vector<Candidate> solve(const Rectangle& box, int count, int depth) const {
    std::vector<Candidate> out;
    if (count == 0) return out;
    if (refine_newton(box, count, out)) return out;

    if (std::max(box.width(), box.height()) <= opts.tol) {
      // Newton could not do better than the box itself.
      out.push_back({box.center(), count, std::abs(f.value(box.center()))});
      return out;
    }
    if (depth >= opts.max_depth)
      throw MaxDepthError("find_roots: exceeded subdivision depth limit");

    for (const double fx : kSplitFractions) {
      const double cx = box.re_min + fx * box.width();
      const double cy = box.im_min + fx * box.height();
      const Rectangle kids[4] = {{box.re_min, cx, box.im_min, cy},
                                 {cx, box.re_max, box.im_min, cy},
                                 {box.re_min, cx, cy, box.im_max},
                                 {cx, box.re_max, cy, box.im_max}};
      int counts[4];
      bool ok = true;
      int sum = 0;
      for (int i = 0; i < 4 && ok; ++i) {
        try {
          counts[i] = winding_count(f, kids[i], opts);
          sum += counts[i];
        } catch (const RootfinderError&) {
          ok = false;
        }
      }
      if (!ok || sum != count) continue;  // split line too close to a root

      if (depth < parallel_depth) {
        std::vector<std::future<std::vector<Candidate>>> futs;
        for (int i = 0; i < 4; ++i)
          futs.push_back(std::async(std::launch::async,
                                    [this, &kids, &counts, depth, i] {
                                      return solve(kids[i], counts[i], depth + 1);
                                    }));
        for (auto& fu : futs) {
          auto part = fu.get();
          out.insert(out.end(), part.begin(), part.end());
        }
      } else {
        for (int i = 0; i < 4; ++i) {
          auto part = solve(kids[i], counts[i], depth + 1);
          out.insert(out.end(), part.begin(), part.end());
        }
      }
      return out;
    }
    throw NonConvergentError(
        "find_roots: could not place a root-free subdivision line in [" +
        std::to_string(box.re_min) + ", " + std::to_string(box.re_max) + "] x [" +
        std::to_string(box.im_min) + ", " + std::to_string(box.im_max) + "] holding " +
        std::to_string(count) + " root(s)");
  }
};

}  // namespace

AnalyticFn analytic(const Quasipolynomial& q) {
  double phase_scale = 0.0;
  for (const auto& t : q.terms()) phase_scale = std::max(phase_scale, std::abs(t.lambda));

  // Exact derivatives up to the degree (the multiplicity cap), shared
  // immutably across threads.
  auto chain = std::make_shared<std::vector<Quasipolynomial>>();
  chain->push_back(q);
  const int orders = std::max(degree(q), 0);
  for (int k = 1; k <= orders && !chain->back().empty(); ++k)
    chain->push_back(derivative(chain->back()));

  AnalyticFn fn;
  fn.value = [chain](Complex s) { return evaluate((*chain)[0], s); };
  fn.derivative = [chain](Complex s) {
    return chain->size() > 1 ? evaluate((*chain)[1], s) : Complex(0.0, 0.0);
  };
  fn.kth_derivative = [chain](int k, Complex s) -> Complex {
    if (k < 0 || k >= static_cast<int>(chain->size()))
      throw std::invalid_argument("kth_derivative: order outside the precomputed chain");
    return evaluate((*chain)[static_cast<std::size_t>(k)], s);
  };
  fn.local_multiplicity = [q](Complex s0, double rel_tol) {
    return multiplicity_at(q, s0, rel_tol).value;
  };
  fn.derivative_orders = static_cast<int>(chain->size()) - 1;
  fn.phase_scale = phase_scale + 0.5;
  return fn;
}

int count_roots(const AnalyticFn& f, const Rectangle& rect, const FindOptions& opts) {
  return winding_count(f, rect, opts);
}

std::vector<Root> find_roots(const AnalyticFn& f, const Rectangle& rect,
                             const FindOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("find_roots: tol must be > 0");
  const int total = winding_count(f, rect, opts);

  int parallel_depth = 0;
  for (unsigned t = 1; t < std::max(opts.threads, 1u); t *= 4) ++parallel_depth;
  Finder finder{f, opts, parallel_depth};
  std::vector<Candidate> cands = finder.solve(rect, total, 0);

  // Merge clusters closer than tol; keep the location with the smallest
  // residual.
  std::vector<Root> roots;
  std::vector<bool> used(cands.size(), false);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (used[i]) continue;
    Candidate best = cands[i];
    int mult = cands[i].multiplicity;
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(cands[j].location - best.location) <= opts.tol) {
        mult += cands[j].multiplicity;
        if (cands[j].residual < best.residual) best = cands[j];
        used[j] = true;
      }
    }
    roots.push_back({best.location, mult, best.residual});
  }
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });

  int check = 0;
  for (const Root& r : roots) check += r.multiplicity;
  if (check != total)
    throw NonConvergentError("find_roots: located multiplicities do not add up to the count");
  return roots;
}

std::vector<Root> find_roots(const Quasipolynomial& q, const Rectangle& rect,
                             const FindOptions& opts) {
  return find_roots(analytic(q), rect, opts);
}

double real_part_upper_bound(const Quasipolynomial& q) {
  if (q.empty()) throw std::invalid_argument("real_part_upper_bound: zero quasipolynomial");
  const auto& terms = q.terms();
  const QuasiTerm& principal = terms.back();  // largest shift
  const int d_top = static_cast<int>(principal.coeffs.size()) - 1;
  const double lead = std::abs(principal.coeffs.back());

  for (std::size_t k = 0; k + 1 < terms.size(); ++k)
    if (static_cast<int>(terms[k].coeffs.size()) - 1 > d_top)
      throw NonConvergentError(
          "real_part_upper_bound: a delayed term dominates the principal degree (advanced type)");

  // Push r right until the competing leading coefficients decay visibly.
  auto competing_leads = [&](double r) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < terms.size(); ++k)
      if (static_cast<int>(terms[k].coeffs.size()) - 1 == d_top)
        s += std::abs(terms[k].coeffs.back()) *
             std::exp((terms[k].lambda - principal.lambda) * r);
    return s;
  };
  double r = 0.0;
  while (competing_leads(r) > 0.5 * lead) {
    r += 0.5;
    if (r > 1e6)
      throw NonConvergentError("real_part_upper_bound: neutral terms never decay");
  }
  if (d_top == 0) return r;  // no roots at all to the right of r

  const double margin = lead - competing_leads(r);
  double coeff_mass = 0.0;
  for (int j = 0; j < d_top; ++j) coeff_mass += std::abs(principal.coeffs[j]);
  for (std::size_t k = 0; k + 1 < terms.size(); ++k) {
    const double damp = std::exp((terms[k].lambda - principal.lambda) * r);
    const int dk = static_cast<int>(terms[k].coeffs.size()) - 1;
    for (int j = 0; j <= std::min(dk, d_top - 1); ++j)
      coeff_mass += std::abs(terms[k].coeffs[j]) * damp;
  }
  return std::max(r, std::max(1.0, coeff_mass / margin));
}

SpectralAbscissa spectral_abscissa(const Quasipolynomial& q, double re_floor, double im_cap,
                                   const FindOptions& opts) {
  if (!(im_cap > 0.0)) throw std::invalid_argument("spectral_abscissa: im_cap must be > 0");
  const double upper = real_part_upper_bound(q);
  const double re_hi = std::max(upper, re_floor) + 0.05 * (1.0 + std::abs(upper));

  const double bump = std::max(1e-7, 1e-7 * im_cap);
  for (int attempt = 0;; ++attempt) {
    const Rectangle rect{re_floor - attempt * bump, re_hi, -(im_cap + attempt * bump),
                         im_cap + attempt * bump};
    try {
      std::vector<Root> roots = find_roots(q, rect, opts);
      if (roots.empty()) return {re_floor, true, {}};
      double best = -std::numeric_limits<double>::infinity();
      for (const Root& rt : roots) best = std::max(best, rt.location.real());
      return {best, false, std::move(roots)};
    } catch (const BoundaryRootError&) {
      if (attempt >= 5) throw;
    }
  }
}

const char* to_string(Dominance d) {
  switch (d) {
    case Dominance::StrictlyDominant: return "StrictlyDominant";
    case Dominance::Dominant: return "Dominant";
    case Dominance::NotDominant: return "NotDominant";
  }
  return "?";
}

Dominance is_dominant(const Quasipolynomial& q, Complex s0, const Rectangle& rect,
                      const FindOptions& opts) {
  if (!rect.contains(s0)) throw std::invalid_argument("is_dominant: rect must contain s0");
  const double val = std::abs(evaluate(q, s0));
  if (!(val <= 1e-6 * scale_at(q, s0)))
    throw std::invalid_argument("is_dominant: s0 is not a root of q");

  std::vector<Root> roots;
  const double bump = 1e-7 * (1.0 + std::max(rect.width(), rect.height()));
  for (int attempt = 0;; ++attempt) {
    Rectangle r = rect;
    r.re_min -= attempt * bump;
    r.re_max += attempt * bump;
    r.im_min -= attempt * bump;
    r.im_max += attempt * bump;
    try {
      roots = find_roots(q, r, opts);
      break;
    } catch (const BoundaryRootError&) {
      if (attempt >= 5) throw;
    }
  }

  const double match_tol = std::max(10.0 * opts.tol, 1e-9 * (1.0 + std::abs(s0)));
  const double re_tol = 1e-6 * (1.0 + std::abs(s0.real()));
  bool coreal = false;
  for (const Root& r : roots) {
    if (std::abs(r.location - s0) <= match_tol) continue;  // s0 itself
    const double dre = r.location.real() - s0.real();
    if (dre > re_tol) return Dominance::NotDominant;
    if (std::abs(dre) <= re_tol) coreal = true;
  }
  return coreal ? Dominance::Dominant : Dominance::StrictlyDominant;
}

}  // namespace delaymid
