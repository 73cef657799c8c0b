#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

#include "bsreduce/problem.hpp"
#include "bsreduce/vasicek.hpp"

namespace bsreduce {

struct McConfig {
  std::int64_t n_paths = 100000;
  /// Time steps per path. GBM stepping is exact, so 1 suffices there.
  int n_steps = 1;
  std::uint64_t seed = 1;
  /// Pairs each normal draw with its negation; n_paths must then be even.
  bool antithetic = false;

  void validate() const;
};

/// Monte Carlo estimates carry std_error; finite-difference estimates carry
/// grid_error (Richardson). The other field stays 0.
struct PriceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double grid_error = 0.0;
};

/// Running mean and sum of squared deviations (Welford), mergeable.
struct RunningStats {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept;
  void merge(const RunningStats& other) noexcept;
  [[nodiscard]] double variance() const noexcept;
  [[nodiscard]] double std_error() const noexcept;
};

/// F with F F^T = cov from the symmetric eigendecomposition (negative
/// round-off eigenvalues clamped to 0), so semidefinite matrices factor.
/// Throws FactorizationFailure when cov is not PSD within tolerance.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov);

/// Terminal values S_i(T) = S_i(0) exp((r - q_i - a_ii/2) T + sqrt(T) (L z)_i),
/// one row per path. With antithetic sampling rows 2k and 2k+1 use z and -z.
Eigen::MatrixXd mc_terminal_samples(const BlackScholesProblem& problem,
                                    std::span<const double> spots, const McConfig& cfg);

/// exp(-rT) E[payoff(S(T))]. Results are bit-identical for a given seed
/// whatever the worker count: paths are processed in fixed-size chunks that
/// are merged in order.
PriceEstimate mc_price(const BlackScholesProblem& problem, std::span<const double> spots,
                       const McConfig& cfg);

struct VasicekMcResult {
  /// Call on F(T) with strike p.strike.
  PriceEstimate price;
  /// E[exp(-int r1)]; compare with bonds.p1.
  PriceEstimate discount_bond;
  /// E[exp(-int r1) F(T)]; compare with fx * bonds.p2.
  PriceEstimate foreign_bond;
  BondPair bonds;
};

/// Three-factor simulation under the domestic risk-neutral measure:
///   dr1 = (b1 - lambda1|sigma1| - a1 r1) dt + sigma1 . dW
///   dr2 = (b2 - lambda2|sigma2| - sigma2 . sigma3 - a2 r2) dt + sigma2 . dW
///   d ln F = (r1 - r2 - |sigma3|^2 / 2) dt + sigma3 . dW
/// The rates use the exact joint Gaussian transition of each step together
/// with sigma3 . dW; integrals of the rates use the trapezoid rule.
/// Needs n_steps >= 64.
VasicekMcResult mc_price_vasicek_fx(const VasicekFxParams& p, const VasicekState& state0,
                                    const McConfig& cfg);

}  // namespace bsreduce
