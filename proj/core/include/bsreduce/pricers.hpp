#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bsreduce/problem.hpp"

namespace bsreduce {

enum class OptionKind { kCall, kPut };

/// Black-Scholes price with continuous carry `dividend`.
/// Zero volatility or zero time to expiry returns the discounted intrinsic
/// value on the deterministic forward. Throws InvalidInput for non-positive
/// spot/strike or negative vol/tau.
double bs_vanilla(double spot, double strike, double vol, double rate, double dividend, double tau,
                  OptionKind kind);

/// Option struck in dollars on a pound-denominated stock.
struct ForeignStrikeParams {
  double sigma_s = 0.0;
  double sigma_x = 0.0;
  double rho = 0.0;
  double rate_dollar = 0.0;
  double rate_pound = 0.0;
  /// Stock price in pounds.
  double stock = 0.0;
  /// Dollars per pound.
  double fx = 0.0;
  /// Strike in dollars.
  double strike_dollar = 0.0;
  double maturity = 1.0;
  double time = 0.0;

  void validate() const;
  /// sigma_S^2 + 2 rho sigma_S sigma_X + sigma_X^2.
  [[nodiscard]] double combined_variance() const noexcept;
};

struct ForeignStrikePrice {
  double dollar = 0.0;
  double pound = 0.0;
};

/// Prices the dollar-struck option through the product variable z = S X:
/// a plain call on z at the dollar rate; the pound price is V_d / X.
ForeignStrikePrice price_foreign_strike(const ForeignStrikeParams& p);

/// The underlying two-asset problem (S, X) with payoff max(S0*S1 - K_d, 0):
/// dividends chosen so the drifts are r_p - rho sigma_S sigma_X and r_d - r_p.
BlackScholesProblem foreign_strike_problem(const ForeignStrikeParams& p);

struct GeometricBasketParams {
  std::vector<double> spots;
  std::vector<double> weights;
  Eigen::MatrixXd cov;
  std::vector<double> dividends;
  double rate = 0.0;
  double strike = 0.0;
  double maturity = 1.0;
  double time = 0.0;

  /// InvalidInput for shape/range errors, WeightsNotSimplex when the weights
  /// are negative or do not sum to 1 (1e-12).
  void validate() const;
};

struct BasketMoments {
  /// sum a_ij w_i w_j
  double variance = 0.0;
  /// sum (q_i + a_ii / 2) w_i - variance / 2
  double carry = 0.0;
};

BasketMoments geometric_basket_moments(const GeometricBasketParams& p);

/// Call on prod S_i^{w_i} as a one-asset call with vol sqrt(variance) and
/// carry `carry`.
double price_geometric_basket(const GeometricBasketParams& p);

/// Problem with payoff max(prod S_i^{w_i} - K, 0) over the basket assets.
BlackScholesProblem geometric_basket_problem(const GeometricBasketParams& p);

}  // namespace bsreduce
