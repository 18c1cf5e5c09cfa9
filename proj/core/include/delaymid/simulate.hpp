#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "delaymid/quasipoly.hpp"

namespace delaymid {

/// Initial data for a single-delay DDAE: the state at t = 0 and the
/// algebraic variables on [-tau, 0).  The handle must also accept t = 0,
/// where it is read as the pre-jump limit y(0-); the algebraic equation
/// then fixes y(0+), which may differ.
struct History {
  Eigen::VectorXd x0;
  std::function<Eigen::VectorXd(double)> y_past;
};

/// Constant-history convenience, y(t) = value on [-tau, 0].
History constant_history(Eigen::VectorXd x0, Eigen::VectorXd y_value);

/// Uniformly sampled solution; column i of x and y holds the values at
/// times[i].  y follows the right-continuous convention at the delay
/// multiples where it jumps.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd x;  ///< d_x rows
  Eigen::MatrixXd y;  ///< d_y rows

  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

struct GridMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct HorizonError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Method-of-steps integration of the single-delay matrix DDAE up to T.
/// The state advances by classical fourth-order Runge-Kutta; delayed
/// algebraic values at half steps come from piecewise cubic interpolation
/// of the stored grid, with stencils that never straddle a multiple of tau
/// (where y's derivatives, and at t = 0 its value, jump).  dt must divide
/// tau exactly, tau = m dt with m >= 50, so that delay lookups at full
/// steps stay on the grid.
Trajectory simulate(const MatrixDdae& sys, const History& hist, double T, double dt);

/// Least-squares slope of the log of the envelope of |x| (Euclidean norm
/// across state components) over the window [t_lo, t_hi].  The envelope
/// consists of the samples that are local maxima of the norm; throws
/// DegenerateError when fewer than three such points exist.
double fit_decay_rate(const Trajectory& traj, double t_lo, double t_hi);

}  // namespace delaymid
