#include "bsreduce/vasicek.hpp"

#include <cmath>

#include "bsreduce/error.hpp"
#include "bsreduce/normal.hpp"
#include "bsreduce/pricers.hpp"
#include "bsreduce/quadrature.hpp"

namespace bsreduce {
namespace {

constexpr double kSeriesCutoff = 1.0;
constexpr int kSeriesTerms = 40;

/// (1 - e^{-x}) / x
double g1(double x) { return x == 0.0 ? 1.0 : -std::expm1(-x) / x; }

/// (g1(x) - 1) / x, i.e. -sum_{k>=2} (-x)^{k-2} / k!
double g_level(double x) {
  if (std::abs(x) < kSeriesCutoff) {
    double term = -0.5;
    double sum = term;
    for (int k = 3; k < kSeriesTerms; ++k) {
      term *= -x / k;
      sum += term;
    }
    return sum;
  }
  return (g1(x) - 1.0) / x;
}

/// (3 - 4e^{-x} + e^{-2x} - 2x) / (2x^3)
double h_vol(double x) {
  if (std::abs(x) < kSeriesCutoff) {
    // sum_{k>=3} (-1)^k (2^k - 4) x^{k-3} / (2 k!)
    double sum = 0.0;
    double pow2 = 8.0;
    double xk = 1.0;
    double fact = 6.0;
    for (int k = 3; k < kSeriesTerms; ++k) {
      const double sign = k % 2 == 0 ? 1.0 : -1.0;
      sum += sign * (pow2 - 4.0) * xk / (2.0 * fact);
      pow2 *= 2.0;
      xk *= x;
      fact *= k + 1;
    }
    return sum;
  }
  const double e = std::exp(-x);
  return (3.0 - 4.0 * e + e * e - 2.0 * x) / (2.0 * x * x * x);
}

void check_bond_inputs(double tau, double a, double sigma_len) {
  if (!(a >= 0.0) || !std::isfinite(a)) fail(Errc::kInvalidInput, "mean reversion speed must be >= 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) fail(Errc::kInvalidInput, "bond tenor must be >= 0");
  if (!(sigma_len >= 0.0)) fail(Errc::kInvalidInput, "rate volatility must be >= 0");
}

}  // namespace

VasicekBond vasicek_bond(double r, double tau, double a, double b, double lambda,
                         double sigma_len) {
  check_bond_inputs(tau, a, sigma_len);
  if (!std::isfinite(r) || !std::isfinite(b) || !std::isfinite(lambda)) {
    fail(Errc::kInvalidInput, "bond inputs must be finite");
  }
  const double x = a * tau;
  const double level = b - lambda * sigma_len;
  VasicekBond out;
  out.b_coeff = tau * g1(x);
  out.log_a = level * tau * tau * g_level(x) -
              0.5 * sigma_len * sigma_len * tau * tau * tau * h_vol(x);
  out.price = std::exp(out.log_a - out.b_coeff * r);
  return out;
}

double vasicek_rate_from_price(double price, double tau, double a, double b, double lambda,
                               double sigma_len) {
  if (!(price > 0.0)) fail(Errc::kInvalidInput, "bond price must be positive");
  if (!(tau > 0.0)) fail(Errc::kInvalidInput, "short rate is undefined at the bond maturity");
  const auto bond = vasicek_bond(0.0, tau, a, b, lambda, sigma_len);
  return (bond.log_a - std::log(price)) / bond.b_coeff;
}

void VasicekFxParams::validate() const {
  if (!(a1 > 0.0) || !(a2 > 0.0)) fail(Errc::kInvalidInput, "mean reversion speeds must be > 0");
  if (!(strike > 0.0)) fail(Errc::kInvalidInput, "strike must be > 0");
  if (!(maturity > 0.0)) fail(Errc::kInvalidInput, "maturity must be > 0");
  const bool finite = std::isfinite(a1) && std::isfinite(a2) && std::isfinite(b1) &&
                      std::isfinite(b2) && std::isfinite(lambda1) && std::isfinite(lambda2) &&
                      sigma1.allFinite() && sigma2.allFinite() && sigma3.allFinite() &&
                      std::isfinite(strike) && std::isfinite(maturity);
  if (!finite) fail(Errc::kInvalidInput, "Vasicek parameters must be finite");
}

double VasicekFxParams::gram_determinant() const noexcept {
  Eigen::Matrix3d m;
  m << sigma1, sigma2, sigma3;
  return (m.transpose() * m).determinant();
}

std::vector<std::string> VasicekFxParams::warnings() const {
  std::vector<std::string> out;
  if (gram_determinant() <= 1e-12) {
    out.emplace_back("volatility vectors are linearly dependent (Gram determinant <= 1e-12)");
  }
  if (lambda1 != 0.0) out.emplace_back("domestic market price of risk is nonzero");
  return out;
}

BondPair vasicek_bond_prices(const VasicekFxParams& p, const VasicekState& state, double t) {
  p.validate();
  if (!(t <= p.maturity)) fail(Errc::kInvalidInput, "valuation time must not exceed maturity");
  const double tau = p.maturity - t;
  return {vasicek_bond(state.r1, tau, p.a1, p.b1, p.lambda1, p.sigma1.norm()).price,
          vasicek_bond(state.r2, tau, p.a2, p.b2, p.lambda2, p.sigma2.norm()).price};
}

VasicekState vasicek_state_from_bonds(const VasicekFxParams& p, double p1, double p2, double fx,
                                      double t) {
  p.validate();
  const double tau = p.maturity - t;
  return {vasicek_rate_from_price(p1, tau, p.a1, p.b1, p.lambda1, p.sigma1.norm()),
          vasicek_rate_from_price(p2, tau, p.a2, p.b2, p.lambda2, p.sigma2.norm()), fx};
}

double fx_vol_integral(double t, double maturity, const VasicekFxParams& p) {
  p.validate();
  if (!(t <= maturity) || !std::isfinite(t)) {
    fail(Errc::kInvalidInput, "integration start must not exceed maturity");
  }
  if (t == maturity) return 0.0;
  const auto integrand = [&](double u) {
    const double tau = maturity - u;
    const double b1 = tau * g1(p.a1 * tau);
    const double b2 = tau * g1(p.a2 * tau);
    return (b1 * p.sigma1 - b2 * p.sigma2 + p.sigma3).squaredNorm();
  };
  return std::max(integrate_gauss_legendre(integrand, t, maturity, 64), 0.0);
}

double vasicek_reduced_price(double y, double strike, double variance) {
  return bs_vanilla(y, strike, std::sqrt(std::max(variance, 0.0)), 0.0, 0.0, 1.0,
                    OptionKind::kCall);
}

double price_fx_option_vasicek(double p1, double p2, double fx, double t, const VasicekFxParams& p) {
  p.validate();
  if (!(p1 > 0.0 && p1 <= 1.0) || !(p2 > 0.0 && p2 <= 1.0)) {
    fail(Errc::kInvalidInput, "bond prices must lie in (0, 1]");
  }
  if (!(fx > 0.0)) fail(Errc::kInvalidInput, "exchange rate must be > 0");
  const double variance = fx_vol_integral(t, p.maturity, p);
  const double forward_leg = p2 * fx;
  const double strike_leg = p.strike * p1;
  double value;
  if (variance == 0.0) {
    value = std::max(forward_leg - strike_leg, 0.0);
  } else {
    const double vol = std::sqrt(variance);
    const double d1 = (std::log(forward_leg / strike_leg) + 0.5 * variance) / vol;
    const double d2 = d1 - vol;
    value = forward_leg * norm_cdf(d1) - strike_leg * norm_cdf(d2);
  }
  const double reduced = p1 * vasicek_reduced_price(forward_leg / p1, p.strike, variance);
  if (std::abs(value - reduced) > 1e-14 * std::max(forward_leg, strike_leg)) {
    fail(Errc::kNumericFailure, "closed form disagrees with the reduced one-dimensional price");
  }
  return value;
}

}  // namespace bsreduce
