#include "bsreduce/pricers.hpp"

#include <cmath>
#include <numeric>
#include <optional>

#include "bsreduce/error.hpp"
#include "bsreduce/normal.hpp"

namespace bsreduce {

double bs_vanilla(double spot, double strike, double vol, double rate, double dividend, double tau,
                  OptionKind kind) {
  if (!(spot > 0.0) || !(strike > 0.0)) {
    fail(Errc::kInvalidInput, "spot and strike must be strictly positive");
  }
  if (!(vol >= 0.0) || !(tau >= 0.0) || !std::isfinite(vol) || !std::isfinite(tau)) {
    fail(Errc::kInvalidInput, "volatility and time to expiry must be finite and non-negative");
  }
  if (!std::isfinite(rate) || !std::isfinite(dividend)) {
    fail(Errc::kInvalidInput, "rate and dividend must be finite");
  }
  const double std_dev = vol * std::sqrt(tau);
  if (std_dev == 0.0) {
    const double forward = spot * std::exp((rate - dividend) * tau);
    const double intrinsic =
        kind == OptionKind::kCall ? std::max(forward - strike, 0.0) : std::max(strike - forward, 0.0);
    return std::exp(-rate * tau) * intrinsic;
  }
  const double d1 = (std::log(spot / strike) + (rate - dividend + 0.5 * vol * vol) * tau) / std_dev;
  const double d2 = d1 - std_dev;
  const double disc_spot = spot * std::exp(-dividend * tau);
  const double disc_strike = strike * std::exp(-rate * tau);
  if (kind == OptionKind::kCall) return disc_spot * norm_cdf(d1) - disc_strike * norm_cdf(d2);
  return disc_strike * norm_cdf(-d2) - disc_spot * norm_cdf(-d1);
}

void ForeignStrikeParams::validate() const {
  if (!(sigma_s >= 0.0) || !(sigma_x >= 0.0)) fail(Errc::kInvalidInput, "volatilities must be >= 0");
  if (!(std::abs(rho) < 1.0)) fail(Errc::kInvalidInput, "correlation must lie in (-1, 1)");
  if (!(stock > 0.0) || !(fx > 0.0) || !(strike_dollar > 0.0)) {
    fail(Errc::kInvalidInput, "stock, exchange rate and strike must be positive");
  }
  if (!(time <= maturity)) fail(Errc::kInvalidInput, "valuation time must not exceed maturity");
  if (!std::isfinite(rate_dollar) || !std::isfinite(rate_pound)) {
    fail(Errc::kInvalidInput, "rates must be finite");
  }
}

double ForeignStrikeParams::combined_variance() const noexcept {
  return sigma_s * sigma_s + 2.0 * rho * sigma_s * sigma_x + sigma_x * sigma_x;
}

ForeignStrikePrice price_foreign_strike(const ForeignStrikeParams& p) {
  p.validate();
  const double z = p.stock * p.fx;
  const double vol = std::sqrt(std::max(p.combined_variance(), 0.0));
  const double dollar =
      bs_vanilla(z, p.strike_dollar, vol, p.rate_dollar, 0.0, p.maturity - p.time, OptionKind::kCall);
  return {dollar, dollar / p.fx};
}

BlackScholesProblem foreign_strike_problem(const ForeignStrikeParams& p) {
  p.validate();
  const double cross = p.rho * p.sigma_s * p.sigma_x;
  Eigen::MatrixXd cov(2, 2);
  cov << p.sigma_s * p.sigma_s, cross, cross, p.sigma_x * p.sigma_x;
  Eigen::VectorXd q(2);
  q << p.rate_dollar - p.rate_pound + cross, p.rate_pound;
  auto payoff = PayoffExpr::max(
      {PayoffExpr::sub(PayoffExpr::mul(PayoffExpr::symbol(0), PayoffExpr::symbol(1)),
                       PayoffExpr::constant(p.strike_dollar)),
       PayoffExpr::constant(0.0)});
  auto problem = make_problem(std::move(cov), p.rate_dollar, std::move(q), p.maturity - p.time,
                              std::move(payoff));
  problem.names = {"S", "X"};
  return problem;
}

void GeometricBasketParams::validate() const {
  const auto m = spots.size();
  if (m == 0) fail(Errc::kInvalidInput, "basket needs at least one asset");
  if (weights.size() != m || dividends.size() != m || cov.rows() != static_cast<Eigen::Index>(m) ||
      cov.cols() != static_cast<Eigen::Index>(m)) {
    fail(Errc::kInvalidInput, "basket inputs disagree in size");
  }
  for (double s : spots) {
    if (!(s > 0.0)) fail(Errc::kInvalidInput, "basket spots must be positive");
  }
  if (!(strike > 0.0)) fail(Errc::kInvalidInput, "strike must be positive");
  if (!(time <= maturity)) fail(Errc::kInvalidInput, "valuation time must not exceed maturity");
  for (double w : weights) {
    if (!(w >= 0.0)) fail(Errc::kWeightsNotSimplex, "weights must be non-negative");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    fail(Errc::kWeightsNotSimplex, "weights must sum to 1");
  }
  require_psd(cov, "basket covariance");
}

BasketMoments geometric_basket_moments(const GeometricBasketParams& p) {
  p.validate();
  const auto m = static_cast<Eigen::Index>(p.spots.size());
  BasketMoments out;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out.variance += p.cov(i, j) * p.weights[static_cast<std::size_t>(i)] *
                      p.weights[static_cast<std::size_t>(j)];
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    out.carry += (p.dividends[static_cast<std::size_t>(i)] + 0.5 * p.cov(i, i)) *
                 p.weights[static_cast<std::size_t>(i)];
  }
  out.carry -= 0.5 * out.variance;
  return out;
}

double price_geometric_basket(const GeometricBasketParams& p) {
  const auto moments = geometric_basket_moments(p);
  double mean = 1.0;
  for (std::size_t i = 0; i < p.spots.size(); ++i) mean *= std::pow(p.spots[i], p.weights[i]);
  return bs_vanilla(mean, p.strike, std::sqrt(std::max(moments.variance, 0.0)), p.rate,
                    moments.carry, p.maturity - p.time, OptionKind::kCall);
}

BlackScholesProblem geometric_basket_problem(const GeometricBasketParams& p) {
  p.validate();
  std::optional<PayoffExpr> product;
  for (std::size_t i = 0; i < p.spots.size(); ++i) {
    if (p.weights[i] == 0.0) continue;
    auto factor = p.weights[i] == 1.0 ? PayoffExpr::symbol(static_cast<int>(i))
                                      : PayoffExpr::pow(PayoffExpr::symbol(static_cast<int>(i)),
                                                        p.weights[i]);
    product = product ? PayoffExpr::mul(*product, factor) : factor;
  }
  auto payoff = PayoffExpr::max(
      {PayoffExpr::sub(*product, PayoffExpr::constant(p.strike)), PayoffExpr::constant(0.0)});
  Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(p.dividends.data(),
                                                        static_cast<Eigen::Index>(p.dividends.size()));
  return make_problem(p.cov, p.rate, std::move(q), p.maturity - p.time, std::move(payoff));
}

}  // namespace bsreduce
