#include "bsreduce/finite_difference.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "bsreduce/error.hpp"

namespace bsreduce {
namespace {

struct Axis {
  std::vector<double> x;
  double h = 0.0;
  /// Index-space position of ln(spot); the grid is centred on it.
  double spot_pos = 0.0;
};

Axis make_axis(double log_spot, double sigma, double drift, double maturity, int intervals,
               double width_sigmas) {
  const double half = std::max(width_sigmas * sigma * std::sqrt(maturity) + std::abs(drift) * maturity,
                               0.25);
  Axis axis;
  axis.h = 2.0 * half / intervals;
  axis.x.resize(static_cast<std::size_t>(intervals) + 1);
  for (int j = 0; j <= intervals; ++j) axis.x[static_cast<std::size_t>(j)] = log_spot - half + j * axis.h;
  if (intervals % 2 == 0) axis.x[static_cast<std::size_t>(intervals / 2)] = log_spot;
  axis.spot_pos = 0.5 * intervals;
  return axis;
}

/// Tridiagonal operator L V_j = lower_j V_{j-1} + diag_j V_j + upper_j V_{j+1}
/// for a_xx/2 V'' + mu V' - c V, with edge rows folded through ghost nodes
/// that enforce V_SS = 0, i.e. V'' = V' in log space.
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  Tridiagonal(int n, double variance, double drift, double decay, double h)
      : lower(static_cast<std::size_t>(n) + 1), diag(lower.size()), upper(lower.size()) {
    const double a = 0.5 * variance / (h * h);
    const double b = drift / (2.0 * h);
    std::fill(lower.begin(), lower.end(), a - b);
    std::fill(diag.begin(), diag.end(), -2.0 * a - decay);
    std::fill(upper.begin(), upper.end(), a + b);
    // V_{-1} = c0 V_0 + c1 V_1 and V_{n+1} = e0 V_n + e1 V_{n-1}.
    const double c0 = 2.0 / (1.0 + 0.5 * h);
    const double c1 = (0.5 * h - 1.0) / (1.0 + 0.5 * h);
    const double e0 = 2.0 / (1.0 - 0.5 * h);
    const double e1 = -(1.0 + 0.5 * h) / (1.0 - 0.5 * h);
    const auto last = static_cast<std::size_t>(n);
    diag[0] += lower[0] * c0;
    upper[0] += lower[0] * c1;
    lower[0] = 0.0;
    diag[last] += upper[last] * e0;
    lower[last] += upper[last] * e1;
    upper[last] = 0.0;
  }

  [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }

  /// out = L v over a strided line.
  void apply(const double* v, std::ptrdiff_t stride, double* out) const {
    const std::size_t n = size();
    for (std::size_t j = 0; j < n; ++j) {
      double s = diag[j] * v[static_cast<std::ptrdiff_t>(j) * stride];
      if (j > 0) s += lower[j] * v[static_cast<std::ptrdiff_t>(j - 1) * stride];
      if (j + 1 < n) s += upper[j] * v[static_cast<std::ptrdiff_t>(j + 1) * stride];
      out[static_cast<std::ptrdiff_t>(j) * stride] = s;
    }
  }

  /// Solves (I - c L) v = rhs in place over a strided line (Thomas).
  void solve_shifted(double c, double* v, std::ptrdiff_t stride, std::vector<double>& work) const {
    const std::size_t n = size();
    work.resize(n);
    auto at = [&](std::size_t j) -> double& { return v[static_cast<std::ptrdiff_t>(j) * stride]; };
    double denom = 1.0 - c * diag[0];
    work[0] = -c * upper[0] / denom;
    at(0) /= denom;
    for (std::size_t j = 1; j < n; ++j) {
      const double l = -c * lower[j];
      denom = (1.0 - c * diag[j]) - l * work[j - 1];
      work[j] = j + 1 < n ? -c * upper[j] / denom : 0.0;
      at(j) = (at(j) - l * at(j - 1)) / denom;
    }
    for (std::size_t j = n - 1; j-- > 0;) at(j) -= work[j] * at(j + 1);
  }
};

/// Cubic Lagrange weights at fractional index `pos` on nodes first..first+3.
std::array<double, 4> cubic_weights(double pos, int n, int& first) {
  first = std::clamp(static_cast<int>(std::floor(pos)) - 1, 0, n - 3);
  std::array<double, 4> w{};
  for (int k = 0; k < 4; ++k) {
    double num = 1.0;
    double den = 1.0;
    for (int m = 0; m < 4; ++m) {
      if (m == k) continue;
      num *= pos - (first + m);
      den *= static_cast<double>(k - m);
    }
    w[static_cast<std::size_t>(k)] = num / den;
  }
  return w;
}

void check_problem(const ParabolicProblem& parab, int dim, std::size_t spots) {
  if (parab.dim() != dim) fail(Errc::kInvalidInput, "solver dimension does not match the problem");
  if (static_cast<int>(spots) != dim) fail(Errc::kInvalidInput, "spot vector has the wrong length");
  if (!(parab.maturity > 0.0)) fail(Errc::kInvalidInput, "maturity must be > 0");
  if (!parab.drift.allFinite() || !parab.diffusion.allFinite() || !std::isfinite(parab.discount)) {
    fail(Errc::kInvalidInput, "parabolic coefficients must be finite");
  }
  require_psd(parab.diffusion, "diffusion matrix");
}

std::vector<Axis> make_axes(const ParabolicProblem& parab, const FdGrid& grid,
                            std::span<const double> spot) {
  std::vector<Axis> axes;
  for (int i = 0; i < parab.dim(); ++i) {
    if (!(spot[static_cast<std::size_t>(i)] > 0.0)) fail(Errc::kInvalidInput, "spot must be > 0");
    axes.push_back(make_axis(std::log(spot[static_cast<std::size_t>(i)]),
                             std::sqrt(std::max(parab.diffusion(i, i), 0.0)), parab.drift(i),
                             parab.maturity, grid.intervals_for(i), grid.half_width_sigmas));
  }
  return axes;
}

/// With no diffusion the solution is the discounted payoff at the forward.
bool deterministic(const ParabolicProblem& parab) { return parab.diffusion.isZero(0.0); }

double deterministic_value(const ParabolicProblem& parab, std::span<const double> spot) {
  std::vector<double> s(spot.size());
  for (std::size_t i = 0; i < spot.size(); ++i) {
    s[i] = spot[i] * std::exp(parab.drift(static_cast<Eigen::Index>(i)) * parab.maturity);
  }
  return std::exp(-parab.discount * parab.maturity) * parab.payoff.eval(s);
}

FdSlice terminal_slice(const ParabolicProblem& parab, const std::vector<Axis>& axes) {
  FdSlice slice;
  for (const auto& a : axes) slice.axes.push_back(a.x);
  if (axes.size() == 1) {
    slice.values.resize(static_cast<Eigen::Index>(axes[0].x.size()), 1);
    for (std::size_t i = 0; i < axes[0].x.size(); ++i) {
      const double x[1] = {axes[0].x[i]};
      slice.values(static_cast<Eigen::Index>(i), 0) = parab.payoff_at_log(x);
    }
  } else {
    slice.values.resize(static_cast<Eigen::Index>(axes[0].x.size()),
                        static_cast<Eigen::Index>(axes[1].x.size()));
    for (std::size_t i = 0; i < axes[0].x.size(); ++i) {
      for (std::size_t j = 0; j < axes[1].x.size(); ++j) {
        const double x[2] = {axes[0].x[i], axes[1].x[j]};
        slice.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            parab.payoff_at_log(x);
      }
    }
  }
  return slice;
}

double solve_1d_once(const ParabolicProblem& parab, const FdGrid& grid, double spot) {
  const double s[1] = {spot};
  const auto axes = make_axes(parab, grid, s);
  const Axis& ax = axes[0];
  const int n = grid.intervals_for(0);
  Eigen::VectorXd v = terminal_slice(parab, axes).values.col(0);
  const Tridiagonal op(n, parab.diffusion(0, 0), parab.drift(0), parab.discount, ax.h);
  const double dt = parab.maturity / grid.time_steps;
  std::vector<double> work;
  Eigen::VectorXd lv(v.size());

  for (int half = 0; half < 2; ++half) op.solve_shifted(0.5 * dt, v.data(), 1, work);
  for (int step = 1; step < grid.time_steps; ++step) {
    op.apply(v.data(), 1, lv.data());
    v += 0.5 * dt * lv;
    op.solve_shifted(0.5 * dt, v.data(), 1, work);
  }

  int first = 0;
  const auto w = cubic_weights(ax.spot_pos, n, first);
  double value = 0.0;
  for (int k = 0; k < 4; ++k) value += w[static_cast<std::size_t>(k)] * v(first + k);
  return value;
}

/// Mixed term a01 * D_1(D_0 V), second-order one-sided differences at edges.
void mixed_term(const Eigen::MatrixXd& v, double coeff, double h0, double h1, Eigen::MatrixXd& out) {
  const Eigen::Index n0 = v.rows();
  const Eigen::Index n1 = v.cols();
  Eigen::MatrixXd d0(n0, n1);
  for (Eigen::Index i = 0; i < n0; ++i) {
    if (i == 0) {
      d0.row(i) = (-3.0 * v.row(0) + 4.0 * v.row(1) - v.row(2)) / (2.0 * h0);
    } else if (i == n0 - 1) {
      d0.row(i) = (3.0 * v.row(i) - 4.0 * v.row(i - 1) + v.row(i - 2)) / (2.0 * h0);
    } else {
      d0.row(i) = (v.row(i + 1) - v.row(i - 1)) / (2.0 * h0);
    }
  }
  for (Eigen::Index j = 0; j < n1; ++j) {
    if (j == 0) {
      out.col(j) = coeff * (-3.0 * d0.col(0) + 4.0 * d0.col(1) - d0.col(2)) / (2.0 * h1);
    } else if (j == n1 - 1) {
      out.col(j) = coeff * (3.0 * d0.col(j) - 4.0 * d0.col(j - 1) + d0.col(j - 2)) / (2.0 * h1);
    } else {
      out.col(j) = coeff * (d0.col(j + 1) - d0.col(j - 1)) / (2.0 * h1);
    }
  }
}

double solve_2d_once(const ParabolicProblem& parab, const FdGrid& grid, std::span<const double> spot) {
  const auto axes = make_axes(parab, grid, spot);
  const int n0 = grid.intervals_for(0);
  const int n1 = grid.intervals_for(1);
  Eigen::MatrixXd v = terminal_slice(parab, axes).values;
  const Tridiagonal op0(n0, parab.diffusion(0, 0), parab.drift(0), 0.5 * parab.discount, axes[0].h);
  const Tridiagonal op1(n1, parab.diffusion(1, 1), parab.drift(1), 0.5 * parab.discount, axes[1].h);
  const double cross = parab.diffusion(0, 1);
  const Eigen::Index rows = v.rows();
  const Eigen::Index cols = v.cols();
  Eigen::MatrixXd a0v(rows, cols);
  Eigen::MatrixXd a1v(rows, cols);
  Eigen::MatrixXd a2v(rows, cols);
  Eigen::MatrixXd y(rows, cols);
  std::vector<double> work;

  // Column-major storage: axis 0 runs along a column (stride 1), axis 1
  // along a row (stride rows).
  auto douglas = [&](double dt, double theta) {
    if (cross != 0.0) {
      mixed_term(v, cross, axes[0].h, axes[1].h, a0v);
    } else {
      a0v.setZero();
    }
    for (Eigen::Index j = 0; j < cols; ++j) op0.apply(&v(0, j), 1, &a1v(0, j));
    for (Eigen::Index i = 0; i < rows; ++i) op1.apply(&v(i, 0), rows, &a2v(i, 0));
    y = v + dt * (a0v + a1v + a2v) - theta * dt * a1v;
    for (Eigen::Index j = 0; j < cols; ++j) op0.solve_shifted(theta * dt, &y(0, j), 1, work);
    y -= theta * dt * a2v;
    for (Eigen::Index i = 0; i < rows; ++i) op1.solve_shifted(theta * dt, &y(i, 0), rows, work);
    v.swap(y);
  };

  const double dt = parab.maturity / grid.time_steps;
  for (int half = 0; half < 2; ++half) douglas(0.5 * dt, 1.0);
  for (int step = 1; step < grid.time_steps; ++step) douglas(dt, 0.5);

  int f0 = 0;
  int f1 = 0;
  const auto w0 = cubic_weights(axes[0].spot_pos, n0, f0);
  const auto w1 = cubic_weights(axes[1].spot_pos, n1, f1);
  double value = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      value += w0[static_cast<std::size_t>(a)] * w1[static_cast<std::size_t>(b)] * v(f0 + a, f1 + b);
    }
  }
  return value;
}

template <typename Solve>
PriceEstimate with_richardson(const FdGrid& grid, Solve&& solve) {
  PriceEstimate out;
  out.value = solve(grid);
  if (!grid.richardson) return out;
  const double coarse = solve(grid.coarsened());
  out.grid_error = std::abs(out.value - coarse) / 3.0;
  if (out.grid_error > 1e-2 * std::abs(out.value) && out.grid_error > 1e-12) {
    fail(Errc::kGridTooCoarse, "Richardson error estimate " + std::to_string(out.grid_error) +
                                   " exceeds 1% of the price " + std::to_string(out.value));
  }
  return out;
}

}  // namespace

void FdGrid::validate(int dim) const {
  if (intervals.empty()) fail(Errc::kInvalidInput, "grid needs at least one interval count");
  if (intervals.size() != 1 && static_cast<int>(intervals.size()) != dim) {
    fail(Errc::kInvalidInput, "grid interval counts do not match the problem dimension");
  }
  for (int n : intervals) {
    if (n < 50) fail(Errc::kInvalidInput, "grid needs at least 50 intervals per dimension");
  }
  if (time_steps < 4) fail(Errc::kInvalidInput, "grid needs at least 4 time steps");
  if (!(half_width_sigmas >= 5.0)) fail(Errc::kInvalidInput, "grid half-width must be >= 5 sigma");
}

int FdGrid::intervals_for(int axis) const {
  return intervals.size() == 1 ? intervals[0] : intervals[static_cast<std::size_t>(axis)];
}

FdGrid FdGrid::coarsened() const {
  FdGrid out = *this;
  for (int& n : out.intervals) n = std::max(n / 2, 4);
  out.time_steps = std::max(time_steps / 2, 2);
  out.richardson = false;
  return out;
}

PriceEstimate fd_solve_1d(const ParabolicProblem& parab, const FdGrid& grid, double spot) {
  const double s[1] = {spot};
  check_problem(parab, 1, 1);
  grid.validate(1);
  if (!(spot > 0.0)) fail(Errc::kInvalidInput, "spot must be > 0");
  if (deterministic(parab)) return {deterministic_value(parab, s), 0.0, 0.0};
  return with_richardson(grid, [&](const FdGrid& g) { return solve_1d_once(parab, g, spot); });
}

PriceEstimate fd_solve_2d(const ParabolicProblem& parab, const FdGrid& grid,
                          std::span<const double> spot) {
  check_problem(parab, 2, spot.size());
  grid.validate(2);
  for (double s : spot) {
    if (!(s > 0.0)) fail(Errc::kInvalidInput, "spot must be > 0");
  }
  if (deterministic(parab)) return {deterministic_value(parab, spot), 0.0, 0.0};
  return with_richardson(grid, [&](const FdGrid& g) { return solve_2d_once(parab, g, spot); });
}

PriceEstimate fd_solve(const ParabolicProblem& parab, const FdGrid& grid,
                       std::span<const double> spot) {
  if (parab.dim() == 1) {
    if (spot.size() != 1) fail(Errc::kInvalidInput, "spot vector has the wrong length");
    return fd_solve_1d(parab, grid, spot[0]);
  }
  if (parab.dim() == 2) return fd_solve_2d(parab, grid, spot);
  fail(Errc::kInvalidInput, "finite differences support one or two dimensions");
}

FdSlice fd_terminal_slice(const ParabolicProblem& parab, const FdGrid& grid,
                          std::span<const double> spot) {
  if (parab.dim() < 1 || parab.dim() > 2) {
    fail(Errc::kInvalidInput, "finite differences support one or two dimensions");
  }
  check_problem(parab, parab.dim(), spot.size());
  grid.validate(parab.dim());
  return terminal_slice(parab, make_axes(parab, grid, spot));
}

double fd_convergence_ratio(const ParabolicProblem& parab, const FdGrid& grid,
                            std::span<const double> spot) {
  FdGrid fine = grid;
  fine.richardson = false;
  const FdGrid mid = fine.coarsened();
  const FdGrid coarse = mid.coarsened();
  auto solve = [&](const FdGrid& g) {
    return parab.dim() == 1 ? solve_1d_once(parab, g, spot[0]) : solve_2d_once(parab, g, spot);
  };
  check_problem(parab, parab.dim(), spot.size());
  grid.validate(parab.dim());
  const double v_fine = solve(fine);
  const double v_mid = solve(mid);
  const double v_coarse = solve(coarse);
  return (v_coarse - v_mid) / (v_mid - v_fine);
}

}  // namespace bsreduce
