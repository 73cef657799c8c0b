#include "bsreduce/monte_carlo.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "bsreduce/error.hpp"
#include "bsreduce/parallel.hpp"
#include "bsreduce/rng.hpp"

namespace bsreduce {
namespace {

constexpr std::int64_t kChunk = 4096;

using SampleFn = std::function<void(std::int64_t unit, std::span<double> out)>;

/// Evaluates fn for units [0, units) in fixed chunks and merges the per-chunk
/// statistics in chunk order.
std::vector<RunningStats> simulate(std::int64_t units, int outputs, const SampleFn& fn) {
  const auto chunks = static_cast<std::size_t>((units + kChunk - 1) / kChunk);
  std::vector<std::vector<RunningStats>> partial(chunks,
                                                 std::vector<RunningStats>(outputs));
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<double> out(static_cast<std::size_t>(outputs));
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(units, begin + kChunk);
    auto& stats = partial[c];
    for (std::int64_t u = begin; u < end; ++u) {
      fn(u, out);
      for (int k = 0; k < outputs; ++k) stats[k].add(out[static_cast<std::size_t>(k)]);
    }
  });
  std::vector<RunningStats> total(static_cast<std::size_t>(outputs));
  for (const auto& stats : partial) {
    for (int k = 0; k < outputs; ++k) total[k].merge(stats[k]);
  }
  return total;
}

/// Precomputed log-space dynamics of a Black-Scholes problem.
struct GbmPaths {
  GbmPaths(const BlackScholesProblem& problem, std::span<const double> spots, const McConfig& cfg)
      : dim(problem.dim()), steps(cfg.n_steps), factor(covariance_factor(problem.cov)) {
    if (static_cast<int>(spots.size()) != dim) {
      fail(Errc::kInvalidInput, "expected " + std::to_string(dim) + " spot values");
    }
    const double h = problem.maturity / steps;
    sqrt_h = std::sqrt(h);
    spot.resize(dim);
    drift_step.resize(dim);
    for (int i = 0; i < dim; ++i) {
      if (!(spots[static_cast<std::size_t>(i)] > 0.0)) {
        fail(Errc::kInvalidInput, "spot values must be strictly positive");
      }
      spot(i) = spots[static_cast<std::size_t>(i)];
      drift_step(i) = (problem.rate - problem.dividends(i) - 0.5 * problem.cov(i, i)) * h;
    }
  }

  /// Fills `normals` (steps * dim) from the path's stream.
  void draw(PathStream& stream, Eigen::VectorXd& normals) const {
    for (Eigen::Index k = 0; k < normals.size(); ++k) normals(k) = stream.normal();
  }

  void terminal(const Eigen::VectorXd& normals, double sign, std::span<double> out) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    for (int s = 0; s < steps; ++s) {
      const Eigen::VectorXd shock = factor * normals.segment(s * dim, dim);
      x += drift_step + (sign * sqrt_h) * shock;
    }
    for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(i)] = spot(i) * std::exp(x(i));
  }

  int dim;
  int steps;
  Eigen::MatrixXd factor;
  Eigen::VectorXd spot;
  Eigen::VectorXd drift_step;
  double sqrt_h = 0.0;
};

PriceEstimate to_estimate(const RunningStats& stats, double scale) {
  return {scale * stats.mean, scale * stats.std_error(), 0.0};
}

}  // namespace

void McConfig::validate() const {
  if (n_paths < 1) fail(Errc::kInvalidInput, "n_paths must be >= 1");
  if (n_steps < 1) fail(Errc::kInvalidInput, "n_steps must be >= 1");
  if (antithetic && n_paths % 2 != 0) {
    fail(Errc::kInvalidInput, "antithetic sampling needs an even number of paths");
  }
}

void RunningStats::add(double x) noexcept {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void RunningStats::merge(const RunningStats& other) noexcept {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const auto n = count + other.count;
  const double delta = other.mean - mean;
  const double w = static_cast<double>(other.count) / static_cast<double>(n);
  mean += delta * w;
  m2 += other.m2 + delta * delta * static_cast<double>(count) * w;
  count = n;
}

double RunningStats::variance() const noexcept {
  return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
}

double RunningStats::std_error() const noexcept {
  return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov) {
  try {
    require_psd(cov, "covariance");
  } catch (const Error& e) {
    fail(Errc::kFactorizationFailure, e.what());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) fail(Errc::kFactorizationFailure, "eigen solver did not converge");
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal();
}

Eigen::MatrixXd mc_terminal_samples(const BlackScholesProblem& problem,
                                    std::span<const double> spots, const McConfig& cfg) {
  validate(problem);
  cfg.validate();
  const GbmPaths paths(problem, spots, cfg);
  Eigen::MatrixXd out(cfg.n_paths, paths.dim);
  const std::int64_t units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
  const auto chunks = static_cast<std::size_t>((units + kChunk - 1) / kChunk);
  parallel_for(chunks, [&](std::size_t c) {
    Eigen::VectorXd normals(paths.steps * paths.dim);
    std::vector<double> row(static_cast<std::size_t>(paths.dim));
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(units, begin + kChunk);
    for (std::int64_t u = begin; u < end; ++u) {
      PathStream stream(cfg.seed, static_cast<std::uint64_t>(u));
      paths.draw(stream, normals);
      const int copies = cfg.antithetic ? 2 : 1;
      for (int k = 0; k < copies; ++k) {
        paths.terminal(normals, k == 0 ? 1.0 : -1.0, row);
        for (int i = 0; i < paths.dim; ++i) out(u * copies + k, i) = row[static_cast<std::size_t>(i)];
      }
    }
  });
  return out;
}

PriceEstimate mc_price(const BlackScholesProblem& problem, std::span<const double> spots,
                       const McConfig& cfg) {
  validate(problem);
  cfg.validate();
  const GbmPaths paths(problem, spots, cfg);
  const std::int64_t units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
  const auto stats = simulate(units, 1, [&](std::int64_t u, std::span<double> out) {
    thread_local Eigen::VectorXd normals;
    thread_local std::vector<double> s;
    normals.resize(paths.steps * paths.dim);
    s.resize(static_cast<std::size_t>(paths.dim));
    PathStream stream(cfg.seed, static_cast<std::uint64_t>(u));
    paths.draw(stream, normals);
    paths.terminal(normals, 1.0, s);
    double v = problem.payoff.eval(s);
    if (cfg.antithetic) {
      paths.terminal(normals, -1.0, s);
      v = 0.5 * (v + problem.payoff.eval(s));
    }
    out[0] = v;
  });
  return to_estimate(stats[0], std::exp(-problem.rate * problem.maturity));
}

VasicekMcResult mc_price_vasicek_fx(const VasicekFxParams& p, const VasicekState& state0,
                                    const McConfig& cfg) {
  p.validate();
  cfg.validate();
  if (cfg.n_steps < 64) fail(Errc::kInvalidInput, "the Vasicek simulation needs n_steps >= 64");
  if (!(state0.fx > 0.0) || !std::isfinite(state0.r1) || !std::isfinite(state0.r2)) {
    fail(Errc::kInvalidInput, "initial state must have finite rates and a positive exchange rate");
  }

  const double h = p.maturity / cfg.n_steps;
  const double speed[3] = {p.a1, p.a2, 0.0};
  const Eigen::Vector3d* vols[3] = {&p.sigma1, &p.sigma2, &p.sigma3};
  Eigen::Matrix3d step_cov;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double x = (speed[i] + speed[j]) * h;
      const double decay = x == 0.0 ? h : -std::expm1(-x) / (speed[i] + speed[j]);
      step_cov(i, j) = vols[i]->dot(*vols[j]) * decay;
    }
  }
  const Eigen::Matrix3d factor = covariance_factor(step_cov);

  const double theta1 = p.b1 - p.lambda1 * p.sigma1.norm();
  const double theta2 = p.b2 - p.lambda2 * p.sigma2.norm() - p.sigma2.dot(p.sigma3);
  const double e1 = std::exp(-p.a1 * h);
  const double e2 = std::exp(-p.a2 * h);
  const double mean1 = theta1 * -std::expm1(-p.a1 * h) / p.a1;
  const double mean2 = theta2 * -std::expm1(-p.a2 * h) / p.a2;
  const double fx_convexity = 0.5 * p.sigma3.squaredNorm();
  const double log_fx0 = std::log(state0.fx);
  const int steps = cfg.n_steps;

  auto run_path = [&](PathStream& stream, double sign, std::span<double> out) {
    double r1 = state0.r1;
    double r2 = state0.r2;
    double log_fx = log_fx0;
    double int_r1 = 0.0;
    for (int s = 0; s < steps; ++s) {
      const Eigen::Vector3d z(stream.normal(), stream.normal(), stream.normal());
      const Eigen::Vector3d x = sign * (factor * z);
      const double r1_next = r1 * e1 + mean1 + x(0);
      const double r2_next = r2 * e2 + mean2 + x(1);
      const double avg1 = 0.5 * (r1 + r1_next);
      const double avg2 = 0.5 * (r2 + r2_next);
      log_fx += (avg1 - avg2 - fx_convexity) * h + x(2);
      int_r1 += avg1 * h;
      r1 = r1_next;
      r2 = r2_next;
    }
    const double disc = std::exp(-int_r1);
    const double fx = std::exp(log_fx);
    out[0] = disc * std::max(fx - p.strike, 0.0);
    out[1] = disc;
    out[2] = disc * fx;
  };

  const std::int64_t units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
  const auto stats = simulate(units, 3, [&](std::int64_t u, std::span<double> out) {
    PathStream stream(cfg.seed, static_cast<std::uint64_t>(u));
    run_path(stream, 1.0, out);
    if (cfg.antithetic) {
      double mirror[3];
      PathStream again(cfg.seed, static_cast<std::uint64_t>(u));
      run_path(again, -1.0, mirror);
      for (int k = 0; k < 3; ++k) out[static_cast<std::size_t>(k)] = 0.5 * (out[static_cast<std::size_t>(k)] + mirror[k]);
    }
  });

  VasicekMcResult result;
  result.price = to_estimate(stats[0], 1.0);
  result.discount_bond = to_estimate(stats[1], 1.0);
  result.foreign_bond = to_estimate(stats[2], 1.0);
  result.bonds = vasicek_bond_prices(p, state0, 0.0);
  return result;
}

}  // namespace bsreduce
