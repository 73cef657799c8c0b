#include <gtest/gtest.h>

#include <cmath>

#include "bsreduce/error.hpp"
#include "bsreduce/finite_difference.hpp"
#include "bsreduce/plan.hpp"
#include "bsreduce/pricers.hpp"
#include "bsreduce/reduction.hpp"
#include "oracles.hpp"

namespace bsreduce {
namespace {

using testing::equicorrelated;
using testing::rel_err;

ParabolicProblem vanilla_parab(double vol, double r, double q, double k) {
  const auto p = make_problem(Eigen::MatrixXd::Constant(1, 1, vol * vol), r, Eigen::VectorXd::Constant(1, q), 1.0,
                              parse_payoff("max(S0 - " + std::to_string(k) + ", 0)"));
  return to_log_parabolic(p);
}

TEST(FiniteDifference, VanillaAgainstClosedForm) {
  for (double k : {80.0, 100.0, 125.0}) {
    const auto parab = vanilla_parab(0.2, 0.05, 0.0, k);
    const auto est = fd_solve_1d(parab, FdGrid{}, 100.0);
    const double exact = bs_vanilla(100, k, 0.2, 0.05, 0.0, 1.0, OptionKind::kCall);
    EXPECT_LE(rel_err(est.value, exact), 1e-3) << k;
    EXPECT_GT(est.grid_error, 0.0);
    EXPECT_EQ(est.std_error, 0.0);
  }
}

TEST(FiniteDifference, SecondOrderConvergence) {
  const auto parab = vanilla_parab(0.2, 0.05, 0.0, 100);
  const double ratio = fd_convergence_ratio(parab, FdGrid{}, std::vector<double>{100.0});
  EXPECT_GE(ratio, 3.2);
  EXPECT_LE(ratio, 4.8);
}

TEST(FiniteDifference, ZeroDiffusionIsExact) {
  const auto parab = vanilla_parab(0.0, 0.05, 0.01, 100);
  const auto est = fd_solve_1d(parab, FdGrid{}, 100.0);
  EXPECT_DOUBLE_EQ(est.value, bs_vanilla(100, 100, 0.0, 0.05, 0.01, 1.0, OptionKind::kCall));
}

TEST(FiniteDifference, TerminalSliceIsPayoff) {
  const auto parab = vanilla_parab(0.3, 0.05, 0.0, 100);
  const auto slice = fd_terminal_slice(parab, FdGrid{}, std::vector<double>{100.0});
  ASSERT_EQ(slice.axes.size(), 1u);
  ASSERT_EQ(slice.axes[0].size(), 401u);
  EXPECT_DOUBLE_EQ(slice.axes[0][200], std::log(100.0));
  for (std::size_t i = 0; i < slice.axes[0].size(); i += 37) {
    EXPECT_EQ(slice.values(static_cast<Eigen::Index>(i), 0), std::max(std::exp(slice.axes[0][i]) - 100, 0.0));
  }
}

TEST(FiniteDifference, GridValidation) {
  FdGrid grid;
  grid.intervals = {20};
  EXPECT_THROW(grid.validate(1), Error);
  grid = FdGrid{};
  grid.half_width_sigmas = 3;
  EXPECT_THROW(grid.validate(1), Error);
  grid = FdGrid{};
  grid.intervals = {400, 200};
  EXPECT_EQ(grid.coarsened().intervals_for(1), 100);
}

TEST(FiniteDifference, CoarseGridIsReported) {
  const auto parab = vanilla_parab(0.2, 0.05, 0.0, 100);
  FdGrid grid;
  grid.intervals = {50};
  grid.time_steps = 4;
  grid.half_width_sigmas = 40;
  try {
    (void)fd_solve_1d(parab, grid, 100.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kGridTooCoarse);
  }
}

// The foreign-strike problem after its pair transform is a one-dimensional
// vanilla with combined variance.
TEST(FiniteDifference, ForeignStrikeReduced) {
  ForeignStrikeParams fs;
  fs.sigma_s = 0.2;
  fs.sigma_x = 0.3;
  fs.rho = 0.5;
  fs.rate_dollar = 0.05;
  fs.rate_pound = 0.03;
  fs.stock = 100;
  fs.fx = 1.3;
  fs.strike_dollar = 130;
  PlanOptions opts;
  opts.probe.center = {fs.stock, fs.fx};
  const auto plan = plan_reduction(foreign_strike_problem(fs), opts);
  ASSERT_EQ(plan.final_problem().dim(), 1);
  const auto mapped = plan.map_spots(std::vector<double>{fs.stock, fs.fx});
  const auto est = fd_solve(to_log_parabolic(plan.final_problem()), FdGrid{}, mapped.spots);
  EXPECT_LE(rel_err(mapped.multiplier * est.value, price_foreign_strike(fs).dollar), 1e-3);
}

TEST(FiniteDifference, TwoDimensionalProductMatchesReduced) {
  const auto p = make_problem(equicorrelated({0.2, 0.3}, 0.4), 0.04, Eigen::VectorXd::Zero(2), 1.0,
                              parse_payoff("max(S0*S1 - 1.3, 0)"));
  const std::vector<double> spots{1.0, 1.3};
  FdGrid grid2;
  grid2.intervals = {160};
  grid2.time_steps = 100;
  const auto two = fd_solve_2d(to_log_parabolic(p), grid2, spots);
  const auto reduced = apply_pair_transform(p, 0, 1, 1.0, 1.0);
  const auto one = fd_solve_1d(to_log_parabolic(reduced), FdGrid{}, 1.3);
  EXPECT_LE(rel_err(two.value, one.value), 2e-3);
}

TEST(FiniteDifference, TwoDimensionalExchangeOption) {
  // Margrabe: max(S0 - S1, 0) with zero carry is a call on S0/S1 with strike
  // 1 and zero rate, scaled by S1.
  const auto p = make_problem(equicorrelated({0.25, 0.2}, 0.3), 0.05, Eigen::VectorXd::Zero(2), 1.0,
                              parse_payoff("max(S0 - S1, 0)"));
  FdGrid grid;
  grid.intervals = {160};
  grid.time_steps = 100;
  const auto est = fd_solve_2d(to_log_parabolic(p), grid, std::vector<double>{100, 95});
  const double vol = std::sqrt(0.0625 + 0.04 - 2 * 0.3 * 0.25 * 0.2);
  const double exact = 95 * bs_vanilla(100.0 / 95, 1.0, vol, 0.0, 0.0, 1.0, OptionKind::kCall);
  EXPECT_LE(rel_err(est.value, exact), 2e-3);
}

}  // namespace
}  // namespace bsreduce
