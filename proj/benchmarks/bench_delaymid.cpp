#include <benchmark/benchmark.h>

#include <complex>

#include "delaymid/feedback.hpp"
#include "delaymid/mid.hpp"
#include "delaymid/quasipoly.hpp"
#include "delaymid/rootfinder.hpp"
#include "delaymid/simulate.hpp"

namespace {

using namespace delaymid;

Quasipolynomial normal_form() {
  return Quasipolynomial({{{-2.0, 1.0}, 0.0}, {{2.0, 1.0}, -1.0}});
}

void BM_evaluate(benchmark::State& state) {
  const Quasipolynomial q = normal_form();
  Complex s(0.3, 7.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(q, s));
    s += Complex(1e-9, -1e-9);
  }
}
BENCHMARK(BM_evaluate);

void BM_multiplicity_at(benchmark::State& state) {
  const Quasipolynomial q = normal_form();
  for (auto _ : state) benchmark::DoNotOptimize(multiplicity_at(q, {0.0, 0.0}));
}
BENCHMARK(BM_multiplicity_at);

void BM_count_roots(benchmark::State& state) {
  const AnalyticFn f = analytic(normal_form());
  const Rectangle rect{-1.0, 1.0, -1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(count_roots(f, rect));
}
BENCHMARK(BM_count_roots);

void BM_find_roots_window(benchmark::State& state) {
  const Quasipolynomial q = normal_form();
  const Rectangle rect{-4.0, 4.0, -double(state.range(0)), double(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(find_roots(q, rect));
}
BENCHMARK(BM_find_roots_window)->Arg(12)->Arg(50);

void BM_simulate(benchmark::State& state) {
  const FeedbackPlant plant{1.0, 1.0, 2.0, 1.0, 1.0, 2.0, 1.5};
  const DesignResult design = design_gains(plant);
  MatrixDdae sys;
  sys.A = Eigen::MatrixXd::Constant(1, 1, plant.a);
  sys.B = {(Eigen::MatrixXd(1, 2) << plant.b * design.gains.k1, plant.b * design.gains.k2)
               .finished()};
  sys.C = (Eigen::MatrixXd(2, 1) << plant.c1, plant.c2).finished();
  sys.D = {(Eigen::MatrixXd(2, 2) << plant.d1 * design.gains.k1, plant.d1 * design.gains.k2,
            plant.d2 * design.gains.k1, plant.d2 * design.gains.k2)
               .finished()};
  sys.taus = {plant.tau};
  const History hist = constant_history(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(2));
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate(sys, hist, 30.0, plant.tau / 200.0));
}
BENCHMARK(BM_simulate);

void BM_design_gains(benchmark::State& state) {
  const FeedbackPlant plant{1.0, 1.0, 2.0, 1.0, 1.0, 2.0, 1.5};
  for (auto _ : state) benchmark::DoNotOptimize(design_gains(plant));
}
BENCHMARK(BM_design_gains);

}  // namespace

BENCHMARK_MAIN();
