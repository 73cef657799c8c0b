#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "bsreduce/error.hpp"
#include "bsreduce/monte_carlo.hpp"
#include "bsreduce/pricers.hpp"
#include "oracles.hpp"

namespace bsreduce {
namespace {

using testing::equicorrelated;

BlackScholesProblem vanilla(double vol, const char* payoff = "max(S0 - 100, 0)") {
  return make_problem(Eigen::MatrixXd::Constant(1, 1, vol * vol), 0.05, Eigen::VectorXd::Constant(1, 0.01), 1.0,
                      parse_payoff(payoff));
}

TEST(RunningStats, MergeMatchesSequential) {
  RunningStats all;
  RunningStats left;
  RunningStats right;
  for (int k = 0; k < 100; ++k) {
    const double x = std::sin(k) * 3 + k * 0.01;
    all.add(x);
    (k < 37 ? left : right).add(x);
  }
  left.merge(right);
  EXPECT_EQ(left.count, all.count);
  EXPECT_NEAR(left.mean, all.mean, 1e-14);
  EXPECT_NEAR(left.m2, all.m2, 1e-11);
}

TEST(MonteCarlo, ZeroVolatilityMatchesClosedFormExactly) {
  McConfig cfg;
  cfg.n_paths = 64;
  const auto mc = mc_price(vanilla(0.0), std::vector<double>{100}, cfg);
  EXPECT_EQ(mc.std_error, 0.0);
  EXPECT_EQ(mc.value, bs_vanilla(100, 100, 0.0, 0.05, 0.01, 1.0, OptionKind::kCall));
}

TEST(MonteCarlo, DiscountedAssetIsMartingale) {
  McConfig cfg;
  cfg.n_paths = 100000;
  cfg.seed = 17;
  const auto mc = mc_price(vanilla(0.4, "S0"), std::vector<double>{100}, cfg);
  EXPECT_LE(std::abs(mc.value - 100 * std::exp(-0.01)), 3.0 * mc.std_error);
}

TEST(MonteCarlo, SampleCorrelation) {
  const auto p = make_problem(equicorrelated({0.2, 0.3}, 0.5), 0.0, Eigen::VectorXd::Zero(2), 1.0,
                              parse_payoff("S0 + S1"));
  McConfig cfg;
  cfg.n_paths = 100000;
  const auto samples = mc_terminal_samples(p, std::vector<double>{1, 1}, cfg);
  const Eigen::ArrayXd x = samples.col(0).array().log();
  const Eigen::ArrayXd y = samples.col(1).array().log();
  const double cx = (x - x.mean()).square().mean();
  const double cy = (y - y.mean()).square().mean();
  const double cxy = ((x - x.mean()) * (y - y.mean())).mean();
  EXPECT_NEAR(cxy / std::sqrt(cx * cy), 0.5, 0.01);
  EXPECT_NEAR(std::sqrt(cx), 0.2, 0.002);
}

TEST(MonteCarlo, VanillaAgainstClosedForm) {
  McConfig cfg;
  cfg.n_paths = 200000;
  cfg.seed = 4;
  const auto mc = mc_price(vanilla(0.25), std::vector<double>{100}, cfg);
  EXPECT_LE(std::abs(mc.value - bs_vanilla(100, 100, 0.25, 0.05, 0.01, 1.0, OptionKind::kCall)),
            3.0 * mc.std_error);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const auto p = make_problem(equicorrelated({0.2, 0.3, 0.25}, 0.2), 0.03, Eigen::VectorXd::Zero(3), 1.0,
                              parse_payoff("max(S0, S1, S2)"));
  McConfig cfg;
  cfg.n_paths = 30000;
  cfg.seed = 99;
  const std::vector<double> spots{100, 100, 100};
  ::setenv("BSREDUCE_THREADS", "1", 1);
  const auto one = mc_price(p, spots, cfg);
  ::setenv("BSREDUCE_THREADS", "4", 1);
  const auto four = mc_price(p, spots, cfg);
  ::unsetenv("BSREDUCE_THREADS");
  EXPECT_EQ(one.value, four.value);
  EXPECT_EQ(one.std_error, four.std_error);
}

TEST(MonteCarlo, AntitheticReducesErrorForMonotonePayoff) {
  McConfig cfg;
  cfg.n_paths = 50000;
  cfg.seed = 8;
  const auto plain = mc_price(vanilla(0.25), std::vector<double>{100}, cfg);
  cfg.antithetic = true;
  const auto anti = mc_price(vanilla(0.25), std::vector<double>{100}, cfg);
  EXPECT_LE(anti.std_error, plain.std_error);
  cfg.n_paths = 11;
  EXPECT_THROW((void)mc_price(vanilla(0.25), std::vector<double>{100}, cfg), Error);
}

TEST(MonteCarlo, RejectsIndefiniteCovariance) {
  Eigen::MatrixXd cov(2, 2);
  cov << 0.04, 0.1, 0.1, 0.04;
  try {
    (void)covariance_factor(cov);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kFactorizationFailure);
  }
  const Eigen::MatrixXd singular = equicorrelated({0.2, 0.2}, 1.0);
  const auto f = covariance_factor(singular);
  EXPECT_NEAR((f * f.transpose() - singular).norm(), 0.0, 1e-15);
}

}  // namespace
}  // namespace bsreduce
