#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "bsreduce/monte_carlo.hpp"
#include "bsreduce/problem.hpp"

namespace bsreduce {

/// Uniform log-space grid centred on ln(spot) in every dimension.
struct FdGrid {
  /// Space intervals per dimension (>= 50). A single entry applies to all
  /// dimensions.
  std::vector<int> intervals{400};
  int time_steps = 400;
  /// Half-width of each axis in units of sigma_i sqrt(T) (>= 5); the drift
  /// over the life of the option is added on top.
  double half_width_sigmas = 6.0;
  /// Also solve on the half-resolution grid and report |V - V_half| / 3.
  bool richardson = true;

  void validate(int dim) const;
  [[nodiscard]] int intervals_for(int axis) const;
  [[nodiscard]] FdGrid coarsened() const;
};

/// Grid nodes along each axis and values on them at one time level.
/// For 2D problems values(i, j) belongs to (axes[0][i], axes[1][j]).
struct FdSlice {
  std::vector<std::vector<double>> axes;
  Eigen::MatrixXd values;
};

/// Crank-Nicolson in x = ln S with a Rannacher start (the first step is
/// replaced by two backward-Euler half steps). Far-field edges assume
/// V_SS = 0. The price at the spot is read off by cubic interpolation.
/// Throws GridTooCoarse when the Richardson estimate exceeds 1e-2 relative.
PriceEstimate fd_solve_1d(const ParabolicProblem& parab, const FdGrid& grid, double spot);

/// Douglas ADI (theta = 1/2, explicit mixed derivative) for two assets,
/// with theta = 1 over a damped first step. Same edge and interpolation
/// conventions as fd_solve_1d.
PriceEstimate fd_solve_2d(const ParabolicProblem& parab, const FdGrid& grid,
                          std::span<const double> spot);

/// Dispatches on parab.dim() (1 or 2).
PriceEstimate fd_solve(const ParabolicProblem& parab, const FdGrid& grid,
                       std::span<const double> spot);

/// Terminal condition on the grid the solver would use.
FdSlice fd_terminal_slice(const ParabolicProblem& parab, const FdGrid& grid,
                          std::span<const double> spot);

/// Convergence ratio (V_{N/4} - V_{N/2}) / (V_{N/2} - V_N) over three grids
/// each halving space and time steps; about 4 for a second-order scheme.
double fd_convergence_ratio(const ParabolicProblem& parab, const FdGrid& grid,
                            std::span<const double> spot);

}  // namespace bsreduce
