#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "delaymid/feedback.hpp"
#include "delaymid/mid.hpp"
#include "delaymid/simulate.hpp"
#include "helpers.hpp"

using namespace delaymid;

namespace {

MatrixDdae closed_loop(const FeedbackPlant& p, const FeedbackGains& g) {
  MatrixDdae sys;
  sys.A = Eigen::MatrixXd::Constant(1, 1, p.a);
  sys.B = {(Eigen::MatrixXd(1, 2) << p.b * g.k1, p.b * g.k2).finished()};
  sys.C = (Eigen::MatrixXd(2, 1) << p.c1, p.c2).finished();
  sys.D = {(Eigen::MatrixXd(2, 2) << p.d1 * g.k1, p.d1 * g.k2, p.d2 * g.k1, p.d2 * g.k2)
               .finished()};
  sys.taus = {p.tau};
  return sys;
}

const FeedbackPlant kPaperPlant{1.0, 1.0, 2.0, 1.0, 1.0, 2.0, 1.5};

Eigen::VectorXd ones1() { return Eigen::VectorXd::Ones(1); }

double max_algebraic_residual(const MatrixDdae& sys, const History& hist, const Trajectory& t) {
  const double tau = sys.taus[0];
  const long m = std::lround(tau / t.dt());
  double worst = 0.0;
  double scale = 1e-30;
  for (long i = 0; i < static_cast<long>(t.times.size()); ++i) {
    const Eigen::VectorXd lag =
        (i - m < 0) ? hist.y_past((i - m) * t.dt()) : Eigen::VectorXd(t.y.col(i - m));
    const Eigen::VectorXd res = t.y.col(i) - sys.C * t.x.col(i) - sys.D[0] * lag;
    worst = std::max(worst, res.cwiseAbs().maxCoeff());
    scale = std::max({scale, t.y.col(i).cwiseAbs().maxCoeff(), t.x.col(i).cwiseAbs().maxCoeff()});
  }
  return worst / scale;
}

}  // namespace

TEST_CASE("decoupled state follows the exact exponential") {
  MatrixDdae sys = to_matrix_ddae({-0.7, 0.0, 1.3, 0.4, 0.1});
  const History hist = constant_history(ones1(), Eigen::VectorXd::Zero(1));
  const Trajectory traj = simulate(sys, hist, 1.0, 1e-3);
  const double got = traj.x(0, traj.x.cols() - 1);
  CHECK(std::abs(got - std::exp(-0.7)) < 1e-8);
  CHECK(traj.times.front() == 0.0);
  // uniform grid
  for (std::size_t i = 1; i < traj.times.size(); ++i)
    CHECK(traj.times[i] - traj.times[i - 1] == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("imaginary-axis spectrum admits a bounded non-decaying solution") {
  // With the s0 = 0 maximal-multiplicity coefficients, x == 1, y == -2 is
  // an exact solution (the eigenfunction of the root at 0): 0 = 2 - 2 and
  // -2 = -4 + 2.
  const MidDdaeConditions cond = ddae_mid(0.0, 1.0);
  MatrixDdae sys = to_matrix_ddae(to_ddae_scalar(cond));
  const History hist = constant_history(ones1(), Eigen::VectorXd::Constant(1, -2.0));
  const Trajectory traj = simulate(sys, hist, 50.0, 1.0 / 100.0);
  double lo = 1e30, hi = 0.0;
  for (long i = 0; i < traj.x.cols(); ++i) {
    lo = std::min(lo, std::abs(traj.x(0, i)));
    hi = std::max(hi, std::abs(traj.x(0, i)));
  }
  CHECK(hi <= 10.0);           // stays within 10x the initial envelope
  CHECK(hi <= 1.0 + 1e-9);     // in fact constant to roundoff
  CHECK(lo >= 1.0 - 1e-9);     // and non-decaying
}

TEST_CASE("algebraic residual stays at roundoff") {
  const DesignResult r = design_gains(kPaperPlant);
  const MatrixDdae sys = closed_loop(kPaperPlant, r.gains);
  const History hist = constant_history(ones1(), Eigen::VectorXd::Zero(2));
  const Trajectory traj = simulate(sys, hist, 30.0, kPaperPlant.tau / 200.0);
  CHECK(max_algebraic_residual(sys, hist, traj) < 1e-12);
}

TEST_CASE("the algebraic variable jumps to the constraint value at t = 0") {
  const DesignResult r = design_gains(kPaperPlant);
  const MatrixDdae sys = closed_loop(kPaperPlant, r.gains);
  const History hist = constant_history(ones1(), Eigen::VectorXd::Zero(2));
  const Trajectory traj = simulate(sys, hist, 3.0, kPaperPlant.tau / 100.0);
  CHECK(traj.y(0, 0) == doctest::Approx(kPaperPlant.c1).epsilon(1e-14));
  CHECK(traj.y(1, 0) == doctest::Approx(kPaperPlant.c2).epsilon(1e-14));
}

TEST_CASE("step halving shows at least fourth-order convergence") {
  const DesignResult r = design_gains(kPaperPlant);
  const MatrixDdae sys = closed_loop(kPaperPlant, r.gains);
  const History hist = constant_history(ones1(), Eigen::VectorXd::Zero(2));
  const double T = 4.5;  // three delay intervals
  double x_end[3];
  int idx = 0;
  for (int m : {64, 128, 256}) {
    const Trajectory traj = simulate(sys, hist, T, kPaperPlant.tau / m);
    x_end[idx++] = traj.x(0, traj.x.cols() - 1);
  }
  const double err_coarse = std::abs(x_end[0] - x_end[1]);
  const double err_fine = std::abs(x_end[1] - x_end[2]);
  const double order = std::log2(err_coarse / err_fine);
  CHECK(order >= 3.5);
}

TEST_CASE("simulation is homogeneous in the initial data") {
  const DesignResult r = design_gains(kPaperPlant);
  const MatrixDdae sys = closed_loop(kPaperPlant, r.gains);
  const double lam = 3.7;
  const History base = constant_history(ones1(), Eigen::VectorXd::Constant(2, 0.25));
  const History scaled =
      constant_history(lam * ones1(), Eigen::VectorXd::Constant(2, lam * 0.25));
  const Trajectory a = simulate(sys, base, 6.0, kPaperPlant.tau / 64.0);
  const Trajectory b = simulate(sys, scaled, 6.0, kPaperPlant.tau / 64.0);
  double scale = a.x.cwiseAbs().maxCoeff();
  for (long i = 0; i < a.x.cols(); ++i)
    CHECK(std::abs(lam * a.x(0, i) - b.x(0, i)) <= 1e-12 * lam * scale);
}

TEST_CASE("grid validation") {
  MatrixDdae sys = to_matrix_ddae({0.5, 1.0, 1.0, 0.2, 1.0});
  const History hist = constant_history(ones1(), Eigen::VectorXd::Zero(1));
  CHECK_THROWS_AS(simulate(sys, hist, 1.0, 0.013), GridMismatchError);   // does not divide
  CHECK_THROWS_AS(simulate(sys, hist, 1.0, 1.0 / 20.0), GridMismatchError);  // m < 50
  CHECK_THROWS_AS(simulate(sys, hist, -1.0, 1e-2), HorizonError);
}

TEST_CASE("fit_decay_rate on a synthetic damped oscillation") {
  Trajectory traj;
  const double dt = 0.01;
  const int n = 4000;
  traj.x.resize(1, n + 1);
  traj.y.resize(0, n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = i * dt;
    traj.times.push_back(t);
    traj.x(0, i) = std::exp(-t / 3.0) * std::cos(5.0 * t);
  }
  CHECK(std::abs(fit_decay_rate(traj, 2.0, 38.0) - (-1.0 / 3.0)) < 0.01);
}

TEST_CASE("fit_decay_rate on a constant signal is zero") {
  Trajectory traj;
  traj.x.resize(1, 501);
  traj.y.resize(0, 501);
  for (int i = 0; i <= 500; ++i) {
    traj.times.push_back(0.01 * i);
    traj.x(0, i) = 2.5;
  }
  CHECK(std::abs(fit_decay_rate(traj, 0.0, 5.0)) < 1e-10);
}

TEST_CASE("fit_decay_rate reports degenerate envelopes") {
  Trajectory traj;
  traj.x.resize(1, 501);
  traj.y.resize(0, 501);
  for (int i = 0; i <= 500; ++i) {
    const double t = 0.01 * i;
    traj.times.push_back(t);
    traj.x(0, i) = std::exp(-t);  // strictly monotone: no interior maxima
  }
  CHECK_THROWS_AS(fit_decay_rate(traj, 0.5, 4.5), DegenerateError);
}

TEST_CASE("reference closed-loop response carries the t^2-modulated mode") {
  // With x(0) = 1 and zero history the triple-root mode enters with a
  // nonzero t^2 coefficient 6/D3(s0) = 6/tau^2, so the response is
  // t^2-modulated exponential decay rather than plain e^{s0 t}; past the
  // peak |x| is monotone and the [5, 30] envelope degenerates.
  const DesignResult r = design_gains(kPaperPlant);
  const MatrixDdae sys = closed_loop(kPaperPlant, r.gains);
  const History hist = constant_history(ones1(), Eigen::VectorXd::Zero(2));
  const Trajectory traj = simulate(sys, hist, 30.0, kPaperPlant.tau / 200.0);

  const double c2 = 6.0 / (kPaperPlant.tau * kPaperPlant.tau);
  for (double t0 : {15.0, 20.0, 25.0, 30.0}) {
    const long i = std::lround(t0 / traj.dt());
    const double predicted = c2 * t0 * t0 * std::exp(r.s0 * t0);
    CHECK(std::abs(traj.x(0, i) - predicted) < 0.02 * predicted);
  }
  CHECK_THROWS_AS(fit_decay_rate(traj, 5.0, 30.0), DegenerateError);
}
