#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "delaymid/quasipoly.hpp"

namespace delaymid {

/// Axis-aligned search region in the complex plane.
struct Rectangle {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  bool contains(Complex z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
  bool valid() const { return re_min < re_max && im_min < im_max; }
};

/// A located zero together with its estimated multiplicity and the
/// absolute value of the function at the refined location.
struct Root {
  Complex location;
  int multiplicity = 1;
  double residual = 0.0;
};

/// Analytic evaluator with derivative.  `phase_scale` bounds how fast the
/// argument of `value` can rotate per unit arclength away from zeros; it
/// seeds the boundary sampling density (max |lambda| for a
/// quasipolynomial).
///
/// The optional capabilities make multiple roots refinable to machine
/// precision: an m-fold root of f is located as a simple root of
/// f^(m-1), which evaluates without the catastrophic cancellation that
/// limits direct evaluation near the root to an eps^(1/m) noise floor.
struct AnalyticFn {
  std::function<Complex(Complex)> value;
  std::function<Complex(Complex)> derivative;
  /// Exact k-th derivative (k = 0 is f itself), available for
  /// k <= derivative_orders; empty when unsupported.
  std::function<Complex(int k, Complex)> kth_derivative;
  /// Scale-aware local multiplicity test at a candidate root.
  std::function<int(Complex s0, double rel_tol)> local_multiplicity;
  int derivative_orders = 1;
  double phase_scale = 1.0;
};

/// Wraps a quasipolynomial (and its derivative) as an evaluator.
AnalyticFn analytic(const Quasipolynomial& q);

struct FindOptions {
  double tol = 1e-9;              ///< location tolerance and cluster-merge radius
  int max_depth = 60;             ///< quadrisection depth limit
  unsigned threads = 1;           ///< max concurrent subrectangle workers
  double boundary_eps_rel = 1e-12;  ///< |f| below this times boundary scale => root on boundary
};

struct RootfinderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// |f| vanished on the rectangle boundary; the caller should perturb the
/// rectangle and retry.
struct BoundaryRootError : RootfinderError {
  using RootfinderError::RootfinderError;
};
struct NonConvergentError : RootfinderError {
  using RootfinderError::RootfinderError;
};
struct MaxDepthError : RootfinderError {
  using RootfinderError::RootfinderError;
};

/// Number of zeros inside rect counted with multiplicity, from the winding
/// number of f along the boundary.  Phase is tracked adaptively so that no
/// accepted jump between consecutive samples exceeds pi/2.
int count_roots(const AnalyticFn& f, const Rectangle& rect, const FindOptions& opts = {});

/// All zeros of f inside rect, each refined by Newton iteration to
/// opts.tol and tagged with its multiplicity.  The multiplicities sum to
/// count_roots(f, rect) and the list is sorted by (Re, Im).
std::vector<Root> find_roots(const AnalyticFn& f, const Rectangle& rect,
                             const FindOptions& opts = {});
std::vector<Root> find_roots(const Quasipolynomial& q, const Rectangle& rect,
                             const FindOptions& opts = {});

/// A provable upper bound on the real part of any zero of q, derived from
/// coefficient magnitudes.  Requires the term with the largest shift to
/// carry the highest polynomial degree (retarded or neutral structure);
/// throws NonConvergentError otherwise.
double real_part_upper_bound(const Quasipolynomial& q);

struct SpectralAbscissa {
  double value = 0.0;
  bool root_free = false;  ///< no roots in the searched region; value = re_floor
  std::vector<Root> roots;
};

/// Max real part over all roots with Re >= re_floor and |Im| <= im_cap.
/// The right edge of the search region comes from real_part_upper_bound.
SpectralAbscissa spectral_abscissa(const Quasipolynomial& q, double re_floor, double im_cap,
                                   const FindOptions& opts = {});

enum class Dominance { StrictlyDominant, Dominant, NotDominant };

const char* to_string(Dominance d);

/// Classifies the root s0 of q against all other roots inside rect:
/// strictly dominant if every other root has smaller real part, dominant
/// if others share it (within tolerance) but none exceeds it.
Dominance is_dominant(const Quasipolynomial& q, Complex s0, const Rectangle& rect,
                      const FindOptions& opts = {});

}  // namespace delaymid
