#include "delaymid/simulate.hpp"

#include <cmath>

namespace delaymid {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Cubic Lagrange interpolation of column data at fractional index pos,
// with the 4-point stencil clamped to [lo_node, hi_node] so that it never
// crosses a smoothness boundary of the stored signal.
VectorXd interp_cubic(const MatrixXd& data, double pos, long lo_node, long hi_node) {
  long base = static_cast<long>(std::floor(pos)) - 1;
  base = std::max(base, lo_node);
  base = std::min(base, hi_node - 3);
  const double u = pos - static_cast<double>(base);
  // Lagrange weights on nodes {0, 1, 2, 3}
  const double w0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
  const double w1 = u * (u - 2.0) * (u - 3.0) / 2.0;
  const double w2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
  const double w3 = u * (u - 1.0) * (u - 2.0) / 6.0;
  return w0 * data.col(base) + w1 * data.col(base + 1) + w2 * data.col(base + 2) +
         w3 * data.col(base + 3);
}

}  // namespace

History constant_history(Eigen::VectorXd x0, Eigen::VectorXd y_value) {
  return {std::move(x0), [y = std::move(y_value)](double) { return y; }};
}

Trajectory simulate(const MatrixDdae& sys, const History& hist, double T, double dt) {
  if (sys.taus.size() != 1 || sys.B.size() != 1 || sys.D.size() != 1)
    throw std::invalid_argument("simulate: exactly one delay is supported");
  const double tau = sys.taus[0];
  if (!(tau > 0.0)) throw std::invalid_argument("simulate: tau must be > 0");
  if (!(T > 0.0)) throw HorizonError("simulate: horizon T must be > 0");
  if (!(dt > 0.0)) throw GridMismatchError("simulate: dt must be > 0");

  const double ratio = tau / dt;
  const long m = static_cast<long>(std::llround(ratio));
  if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio)
    throw GridMismatchError("simulate: dt must divide tau exactly (dt = tau/m)");
  if (m < 50) throw GridMismatchError("simulate: need at least 50 steps per delay interval");

  const Eigen::Index dx = sys.dim_x();
  const Eigen::Index dy = sys.dim_y();
  if (sys.A.cols() != dx || sys.B[0].rows() != dx || sys.B[0].cols() != dy ||
      sys.C.cols() != dx || sys.D[0].rows() != dy || sys.D[0].cols() != dy)
    throw std::invalid_argument("simulate: inconsistent system dimensions");
  if (hist.x0.size() != dx) throw std::invalid_argument("simulate: x0 has the wrong dimension");
  if (!hist.y_past) throw std::invalid_argument("simulate: missing y history");

  const long n = static_cast<long>(std::ceil(T / dt - 1e-9));
  const MatrixXd& A = sys.A;
  const MatrixXd& B = sys.B[0];
  const MatrixXd& C = sys.C;
  const MatrixXd& D = sys.D[0];

  Trajectory traj;
  traj.times.resize(n + 1);
  traj.x.resize(dx, n + 1);
  traj.y.resize(dy, n + 1);
  for (long i = 0; i <= n; ++i) traj.times[i] = static_cast<double>(i) * dt;

  traj.x.col(0) = hist.x0;
  traj.y.col(0) = C * hist.x0 + D * hist.y_past(-tau);

  // Left limits of y at the delay multiples, needed by the final RK4 stage
  // of each step that ends on one (the stored grid keeps right limits).
  std::vector<VectorXd> left_limit;
  left_limit.push_back(hist.y_past(0.0));

  // y at grid node j (right-continuous); negative nodes read the history.
  auto y_node = [&](long j) -> VectorXd {
    if (j < 0) return hist.y_past(static_cast<double>(j) * dt);
    return traj.y.col(j);
  };
  // y at fractional node position j + 1/2, interpolated inside the
  // smoothness piece [p tau, (p+1) tau) that contains it.
  auto y_half = [&](long j) -> VectorXd {
    const double t = (static_cast<double>(j) + 0.5) * dt;
    if (t < 0.0) return hist.y_past(t);
    const long piece = j / m;
    return interp_cubic(traj.y, static_cast<double>(j) + 0.5, piece * m, (piece + 1) * m - 1);
  };

  for (long i = 0; i < n; ++i) {
    const long j = i - m;  // lag node for time t_i
    const VectorXd ylag0 = y_node(j);
    const VectorXd ylag_half = y_half(j);
    const bool ends_on_boundary = ((i + 1) % m) == 0;
    VectorXd ylag1_stage;
    if (ends_on_boundary) {
      const long piece_end = (i + 1) / m - 1;  // node j+1 == piece_end * m
      ylag1_stage = left_limit[piece_end];
    } else {
      ylag1_stage = y_node(j + 1);
    }

    const VectorXd& xi = traj.x.col(i);
    const VectorXd k1 = A * xi + B * ylag0;
    const VectorXd k2 = A * (xi + 0.5 * dt * k1) + B * ylag_half;
    const VectorXd k3 = A * (xi + 0.5 * dt * k2) + B * ylag_half;
    const VectorXd k4 = A * (xi + dt * k3) + B * ylag1_stage;
    traj.x.col(i + 1) = xi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    traj.y.col(i + 1) = C * traj.x.col(i + 1) + D * y_node(j + 1);

    if (ends_on_boundary) {
      const long piece = (i + 1) / m;  // t_{i+1} = piece * tau
      left_limit.push_back(C * traj.x.col(i + 1) + D * left_limit[piece - 1]);
    }
  }
  return traj;
}

double fit_decay_rate(const Trajectory& traj, double t_lo, double t_hi) {
  const long n = static_cast<long>(traj.times.size());
  if (n < 3) throw DegenerateError("fit_decay_rate: trajectory too short");
  if (!(t_lo < t_hi)) throw std::invalid_argument("fit_decay_rate: need t_lo < t_hi");

  std::vector<double> ts, logs;
  for (long i = 1; i + 1 < n; ++i) {
    const double t = traj.times[i];
    if (t < t_lo || t > t_hi) continue;
    const double v = traj.x.col(i).norm();
    if (v <= 0.0) continue;
    if (v >= traj.x.col(i - 1).norm() && v >= traj.x.col(i + 1).norm()) {
      ts.push_back(t);
      logs.push_back(std::log(v));
    }
  }
  if (ts.size() < 3)
    throw DegenerateError("fit_decay_rate: fewer than 3 envelope points in the window");

  const double nn = static_cast<double>(ts.size());
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    ml += logs[i];
  }
  mt /= nn;
  ml /= nn;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - mt) * (logs[i] - ml);
    den += (ts[i] - mt) * (ts[i] - mt);
  }
  if (den == 0.0) throw DegenerateError("fit_decay_rate: degenerate time spread");
  return num / den;
}

}  // namespace delaymid
