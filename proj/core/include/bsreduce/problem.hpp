#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "bsreduce/payoff.hpp"

namespace bsreduce {

/// Symmetry tolerance, relative to the largest entry.
inline constexpr double kSymmetryTolerance = 1e-12;
/// Minimum eigenvalue floor, relative to the trace.
inline constexpr double kPsdTolerance = 1e-10;

/// Terminal-value problem for the (n+1)-asset Black-Scholes equation
///
///   V_t + 1/2 sum a_ij S_i S_j V_ij + sum (r - q_i) S_i V_i - r V = 0,
///   V(S, T) = payoff(S).
///
/// `cov` is the annualized covariance of log returns. `names` labels each
/// coordinate for reporting; reductions keep it aligned with the indices.
struct BlackScholesProblem {
  Eigen::MatrixXd cov;
  double rate = 0.0;
  Eigen::VectorXd dividends;
  double maturity = 1.0;
  PayoffExpr payoff;
  std::vector<std::string> names;

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(cov.rows()); }
};

/// Builds a problem with default names S0..Sn.
BlackScholesProblem make_problem(Eigen::MatrixXd cov, double rate, Eigen::VectorXd dividends,
                                 double maturity, PayoffExpr payoff);

/// Covariance from volatilities and a correlation matrix.
Eigen::MatrixXd covariance_from_vols(const Eigen::VectorXd& vols, const Eigen::MatrixXd& corr);

/// Checks every structural invariant; throws InvalidInput, NotSymmetric or
/// NotPSD.
void validate(const BlackScholesProblem& problem);

/// Minimum eigenvalue of a symmetric matrix. Throws NotSymmetric when the
/// asymmetry exceeds 1e-12 * max|entry|. Callers reject the matrix when the
/// result is below -1e-10 * trace.
double assert_psd(const Eigen::MatrixXd& m);

/// assert_psd plus the trace-relative floor; throws NotPSD.
void require_psd(const Eigen::MatrixXd& m, const std::string& what);

/// z = prod_{i in group} S_i^{alpha_i}. Groups are stored sorted by index.
class MultiplicativeTransform {
 public:
  /// Sorts (index, alpha) pairs by index. Throws InvalidInput on size
  /// mismatch, fewer than two entries, repeated or negative indices,
  /// non-finite alphas or an all-zero alpha vector.
  MultiplicativeTransform(std::vector<int> group, std::vector<double> alphas);

  [[nodiscard]] const std::vector<int>& group() const noexcept { return group_; }
  [[nodiscard]] const std::vector<double>& alphas() const noexcept { return alphas_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(group_.size()); }

  /// Throws InvalidInput if any index is >= dim.
  void check_range(int dim) const;
  /// Position of the first nonzero exponent; the rewrite substitutes z there.
  [[nodiscard]] int pivot() const noexcept;
  [[nodiscard]] double apply(std::span<const double> s) const;
  [[nodiscard]] bool contains(int index) const noexcept;

 private:
  std::vector<int> group_;
  std::vector<double> alphas_;
};

/// The problem in log coordinates x_i = ln S_i:
///   V_t + 1/2 sum a_ij V_{x_i x_j} + sum mu_i V_{x_i} - r V = 0,
///   mu_i = r - q_i - a_ii / 2.
/// `payoff` is still expressed over S; evaluate it at exp(x).
struct ParabolicProblem {
  Eigen::MatrixXd diffusion;
  Eigen::VectorXd drift;
  double discount = 0.0;
  double maturity = 1.0;
  PayoffExpr payoff;

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(diffusion.rows()); }
  [[nodiscard]] double payoff_at_log(std::span<const double> x) const;
};

}  // namespace bsreduce
