#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bsreduce {

/// Zero-coupon bond under dr = (b - a r) dt + sigma . dW, priced with the
/// risk-adjusted level b - lambda |sigma|: p = A(tau) exp(-B(tau) r).
struct VasicekBond {
  double price = 1.0;
  double b_coeff = 0.0;
  /// ln A(tau).
  double log_a = 0.0;
};

/// Requires a >= 0 (a = 0 is the Ho-Lee limit) and tau >= 0. Small a*tau
/// goes through power series so B -> tau without cancellation.
VasicekBond vasicek_bond(double r, double tau, double a, double b, double lambda,
                         double sigma_len);

/// Short rate implied by a bond price: r = (ln A - ln p) / B. Needs tau > 0.
double vasicek_rate_from_price(double price, double tau, double a, double b, double lambda,
                               double sigma_len);

/// Two Vasicek short rates (domestic 1, foreign 2) and a Garman-Kohlhagen
/// exchange rate driven by one 3-dimensional Brownian motion.
struct VasicekFxParams {
  double a1 = 0.1;
  double a2 = 0.1;
  double b1 = 0.0;
  double b2 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Eigen::Vector3d sigma1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d sigma2 = Eigen::Vector3d::Zero();
  Eigen::Vector3d sigma3 = Eigen::Vector3d::Zero();
  double strike = 1.0;
  double maturity = 1.0;

  /// Throws InvalidInput on non-positive speeds, strike or maturity and on
  /// non-finite entries.
  void validate() const;
  /// det of the Gram matrix [sigma_i . sigma_j].
  [[nodiscard]] double gram_determinant() const noexcept;
  /// Advisory messages, e.g. when the sigma vectors are linearly dependent
  /// (Gram determinant <= 1e-12). Degenerate inputs are still priced.
  [[nodiscard]] std::vector<std::string> warnings() const;
};

/// Market state at valuation time t.
struct VasicekState {
  double r1 = 0.0;
  double r2 = 0.0;
  double fx = 1.0;
};

struct BondPair {
  double p1 = 1.0;
  double p2 = 1.0;
};

/// Domestic and foreign bond prices for maturity p.maturity seen at time t.
BondPair vasicek_bond_prices(const VasicekFxParams& p, const VasicekState& state, double t = 0.0);

/// Inverse of vasicek_bond_prices for the rates; fx is passed through.
VasicekState vasicek_state_from_bonds(const VasicekFxParams& p, double p1, double p2, double fx,
                                      double t = 0.0);

/// Integral over [t, T] of |B1(u,T) sigma1 - B2(u,T) sigma2 + sigma3|^2 by
/// 64-point Gauss-Legendre.
double fx_vol_integral(double t, double maturity, const VasicekFxParams& p);

/// Reduced one-dimensional rate-0 price U(y) = y N(d1) - K N(d2) for the
/// relative price y = p2 F / p1 with total variance `variance`.
double vasicek_reduced_price(double y, double strike, double variance);

/// Call on the exchange rate: V = p2 F N(d1) - K p1 N(d2). Checks internally
/// that V matches p1 * vasicek_reduced_price(p2 F / p1, ...) to 1e-14 of the
/// larger leg; throws NumericFailure otherwise.
double price_fx_option_vasicek(double p1, double p2, double fx, double t, const VasicekFxParams& p);

}  // namespace bsreduce
