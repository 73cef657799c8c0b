#pragma once

#include <string>
#include <vector>

#include "bsreduce/problem.hpp"
#include "bsreduce/structure.hpp"

namespace bsreduce {

/// Exponents above this magnitude are legal but flagged in plan reports.
inline constexpr double kLargeExponentWarning = 10.0;

/// z = S_i0^alpha0 * S_i1^alpha1 replaces the pair; z becomes coordinate 0
/// and the untouched assets follow in their original order.
///
///   a_zz = sum_{i,j in pair} a_ij alpha_i alpha_j
///   a_zj = a_{i0 j} alpha0 + a_{i1 j} alpha1
///   q_z  = r - sum_i (r - q_i - a_ii / 2) alpha_i - a_zz / 2
///
/// The payoff is rewritten through rewrite_payoff (PayoffNotReducible if it
/// is not a function of z) and the reduced covariance is re-checked (NotPSD).
BlackScholesProblem apply_pair_transform(const BlackScholesProblem& problem, int i0, int i1,
                                         double alpha0, double alpha1,
                                         const ProbeConfig& probe = {});

/// Direct form for a group of any size: a_zz = alpha^T A_GG alpha, with the
/// cross terms and q_z following the pair pattern summed over the group.
BlackScholesProblem apply_group_transform(const BlackScholesProblem& problem,
                                          const MultiplicativeTransform& t,
                                          const ProbeConfig& probe = {});

/// Same reduction computed as a left fold of apply_pair_transform. Kept as an
/// independent route for cross-checking the direct form.
BlackScholesProblem apply_group_transform_pairwise(const BlackScholesProblem& problem,
                                                   const MultiplicativeTransform& t,
                                                   const ProbeConfig& probe = {});

/// Coefficient algebra only: the caller supplies the reduced payoff. No
/// reducibility check is made, which is what the forced-exponent negative
/// control relies on.
BlackScholesProblem transform_coefficients(const BlackScholesProblem& problem,
                                           const MultiplicativeTransform& t,
                                           PayoffExpr reduced_payoff);

/// Change of numeraire U = V / S_k, z_i = S_i / S_k for a payoff that is
/// positively homogeneous of degree one (NotHomogeneous otherwise).
///
/// The reduced covariance is a_ij - a_ik - a_kj + a_kk. The reduced rate is
/// the numeraire's own carry q_k (zero for a non-paying numeraire) and the
/// remaining dividends are unchanged, which is the Black-Scholes form of
/// V = S_k e^{-q_k tau} E^k[F(z_T)].
BlackScholesProblem apply_numeraire_change(const BlackScholesProblem& problem, int numeraire,
                                           const ProbeConfig& probe = {});

/// Log-space parabolic form with drift r - q_i - a_ii / 2.
ParabolicProblem to_log_parabolic(const BlackScholesProblem& problem);

/// Matrix T with y = T x mapping (n+1) log coordinates onto the n reduced
/// ones for transform `t` (row 0 holds the exponents).
Eigen::MatrixXd log_space_map(int dim, const MultiplicativeTransform& t);

/// Names of exponents whose magnitude exceeds kLargeExponentWarning.
std::vector<std::string> exponent_warnings(const MultiplicativeTransform& t);

}  // namespace bsreduce
