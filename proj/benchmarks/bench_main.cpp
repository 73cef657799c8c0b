#include <benchmark/benchmark.h>

#include "bsreduce/finite_difference.hpp"
#include "bsreduce/monte_carlo.hpp"
#include "bsreduce/plan.hpp"
#include "bsreduce/pricers.hpp"
#include "bsreduce/reduction.hpp"
#include "bsreduce/vasicek.hpp"

namespace {

using namespace bsreduce;

Eigen::MatrixXd equicorrelated(int dim, double vol, double rho) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(dim, dim, rho * vol * vol);
  m.diagonal().setConstant(vol * vol);
  return m;
}

void BM_BsVanilla(benchmark::State& state) {
  double s = 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bs_vanilla(s, 100, 0.2, 0.05, 0.0, 1.0, OptionKind::kCall));
    s += 1e-9;
  }
}
BENCHMARK(BM_BsVanilla);

void BM_PayoffEval(benchmark::State& state) {
  const auto expr = parse_payoff("max(S0*S1*S2 - 1000, 0) + min(S0, S1) / S2");
  const std::vector<double> s{10, 11, 9};
  for (auto _ : state) benchmark::DoNotOptimize(expr.eval(s));
}
BENCHMARK(BM_PayoffEval);

void BM_PlanReduction(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  std::string payoff = "max(S0";
  for (int i = 1; i < dim; ++i) payoff += "*S" + std::to_string(i);
  payoff += " - 1, 0)";
  const auto p = make_problem(equicorrelated(dim, 0.2, 0.3), 0.05, Eigen::VectorXd::Zero(dim), 1.0,
                              parse_payoff(payoff));
  for (auto _ : state) benchmark::DoNotOptimize(plan_reduction(p));
}
BENCHMARK(BM_PlanReduction)->Arg(2)->Arg(4)->Arg(8);

void BM_McPrice(benchmark::State& state) {
  const auto p = make_problem(equicorrelated(3, 0.25, 0.3), 0.05, Eigen::VectorXd::Zero(3), 1.0,
                              parse_payoff("max(S0, S1, S2)"));
  McConfig cfg;
  cfg.n_paths = state.range(0);
  const std::vector<double> spots{100, 100, 100};
  for (auto _ : state) benchmark::DoNotOptimize(mc_price(p, spots, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McPrice)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FdSolve1d(benchmark::State& state) {
  const auto p = make_problem(Eigen::MatrixXd::Constant(1, 1, 0.04), 0.05, Eigen::VectorXd::Zero(1), 1.0,
                              parse_payoff("max(S0 - 100, 0)"));
  const auto parab = to_log_parabolic(p);
  FdGrid grid;
  grid.intervals = {static_cast<int>(state.range(0))};
  grid.time_steps = static_cast<int>(state.range(0));
  grid.richardson = false;
  for (auto _ : state) benchmark::DoNotOptimize(fd_solve_1d(parab, grid, 100.0));
}
BENCHMARK(BM_FdSolve1d)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_FdSolve2d(benchmark::State& state) {
  const auto p = make_problem(equicorrelated(2, 0.25, 0.3), 0.0, Eigen::VectorXd::Zero(2), 1.0,
                              parse_payoff("max(1, S0, S1)"));
  const auto parab = to_log_parabolic(p);
  FdGrid grid;
  grid.intervals = {static_cast<int>(state.range(0))};
  grid.time_steps = static_cast<int>(state.range(0));
  grid.richardson = false;
  const std::vector<double> spots{1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(fd_solve_2d(parab, grid, spots));
}
BENCHMARK(BM_FdSolve2d)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_VasicekClosedForm(benchmark::State& state) {
  VasicekFxParams p;
  p.a1 = 0.1;
  p.a2 = 0.2;
  p.b1 = 0.005;
  p.b2 = 0.004;
  p.sigma1 = {0.01, 0.0, 0.0};
  p.sigma2 = {0.0, 0.015, 0.0};
  p.sigma3 = {0.0, 0.0, 0.1};
  p.strike = 1.3;
  for (auto _ : state) benchmark::DoNotOptimize(price_fx_option_vasicek(0.97, 0.98, 1.3, 0.0, p));
}
BENCHMARK(BM_VasicekClosedForm);

}  // namespace

BENCHMARK_MAIN();
