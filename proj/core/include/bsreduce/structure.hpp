#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bsreduce/payoff.hpp"
#include "bsreduce/problem.hpp"

namespace bsreduce {

/// Numeric probing setup for structure detection.
///
/// Sample points are s_i = center_i * u_i with u_i drawn from a Halton
/// sequence on [lo, hi] (log-uniform). The defaults probe around s = 1; pass
/// the asset spots as `center` for payoffs whose kinks sit far from 1 (a
/// strike of 100 leaves max(S0*S1 - 100, 0) identically zero near s = 1).
struct ProbeConfig {
  std::vector<double> center;
  double lo = 0.5;
  double hi = 2.0;
  double tol = 1e-9;
  int points = 64;
  double fd_step = 1e-5;
  int kink_retries = 8;
};

/// Result of a successful detection: P(S) = F(z, S_rest) with
/// z = prod_{group} S_i^{alpha_i}. `residual` is F with z as symbol 0 and the
/// remaining assets renumbered in their original order.
struct GroupStructure {
  std::vector<int> group;
  std::vector<double> alphas;
  PayoffExpr residual;
};

/// Deterministic quasi-random probe points for a `dim`-asset payoff.
/// Row k is the k-th point; `offset` skips leading Halton indices.
std::vector<std::vector<double>> probe_points(int dim, int count, const ProbeConfig& config,
                                              int offset = 1);

/// P(a s) == a P(s) for a in {0.5, 2, 3.7} at every probe point, relative
/// tolerance config.tol. A payoff that vanishes at every probe point is
/// reported as not homogeneous (the probe cannot tell).
bool check_homogeneity(const PayoffExpr& expr, int dim, const ProbeConfig& config = {});

/// Looks for exponents alpha such that P depends on the candidate assets only
/// through prod S_i^{alpha_i}. The exponents come from a central-difference
/// gradient of P(exp x) and are then validated by checking that P is
/// unchanged along log-space directions orthogonal to alpha. Exponents are
/// normalized so the first nonzero one is 1.
///
/// Returns nullopt when no consistent alpha exists (or P is flat on the
/// probe domain). Throws NonDifferentiableKink if every reference point
/// tried sits on a max/min kink.
std::optional<GroupStructure> detect_group_structure(const PayoffExpr& expr, int dim,
                                                     std::span<const int> candidate,
                                                     const ProbeConfig& config = {});

/// Rewrites P over (z, S_rest): the pivot asset is replaced by
/// z^(1/alpha_pivot), other group members by 1. The identity
/// F(z(s), s_rest) == P(s) is checked at 256 probe points (1e-12 relative);
/// throws PayoffNotReducible when it fails.
PayoffExpr rewrite_payoff(const PayoffExpr& expr, int dim, const MultiplicativeTransform& t,
                          const ProbeConfig& config = {});

/// F(z_1..z_n) = P(1, z_1, ..., z_n) with the numeraire asset removed and the
/// rest renumbered in order.
PayoffExpr numeraire_payoff(const PayoffExpr& expr, int dim, int numeraire);

}  // namespace bsreduce
