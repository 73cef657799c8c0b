#include "bsreduce/problem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "bsreduce/error.hpp"

namespace bsreduce {

BlackScholesProblem make_problem(Eigen::MatrixXd cov, double rate, Eigen::VectorXd dividends,
                                 double maturity, PayoffExpr payoff) {
  BlackScholesProblem p;
  p.cov = std::move(cov);
  p.rate = rate;
  p.dividends = std::move(dividends);
  p.maturity = maturity;
  p.payoff = std::move(payoff);
  p.names.reserve(static_cast<std::size_t>(p.cov.rows()));
  for (Eigen::Index i = 0; i < p.cov.rows(); ++i) p.names.push_back("S" + std::to_string(i));
  return p;
}

Eigen::MatrixXd covariance_from_vols(const Eigen::VectorXd& vols, const Eigen::MatrixXd& corr) {
  if (corr.rows() != vols.size() || corr.cols() != vols.size()) {
    fail(Errc::kInvalidInput, "correlation matrix must be " + std::to_string(vols.size()) +
                                  "x" + std::to_string(vols.size()));
  }
  for (Eigen::Index i = 0; i < vols.size(); ++i) {
    if (!(vols[i] >= 0.0) || !std::isfinite(vols[i])) {
      fail(Errc::kInvalidInput, "volatilities must be finite and non-negative");
    }
    if (std::abs(corr(i, i) - 1.0) > 1e-12) {
      fail(Errc::kInvalidInput, "correlation diagonal must be 1");
    }
  }
  return vols.asDiagonal() * corr * vols.asDiagonal();
}

double assert_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(Errc::kInvalidInput, "matrix must be square and non-empty");
  }
  if (!m.allFinite()) fail(Errc::kInvalidInput, "matrix has non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    fail(Errc::kNotSymmetric, "asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(Errc::kNumericFailure, "eigen-decomposition failed");
  return solver.eigenvalues().minCoeff();
}

void require_psd(const Eigen::MatrixXd& m, const std::string& what) {
  const double min_eig = assert_psd(m);
  const double floor = -kPsdTolerance * m.trace();
  if (min_eig < floor || (m.trace() == 0.0 && min_eig < 0.0)) {
    fail(Errc::kNotPsd, what + " has minimum eigenvalue " + std::to_string(min_eig));
  }
}

void validate(const BlackScholesProblem& problem) {
  const int n = problem.dim();
  if (n < 1) fail(Errc::kInvalidInput, "problem dimension must be at least 1");
  if (n > kMaxAssets) fail(Errc::kInvalidInput, "at most 16 assets are supported");
  if (problem.cov.cols() != n) fail(Errc::kInvalidInput, "covariance matrix must be square");
  if (problem.dividends.size() != n) {
    fail(Errc::kInvalidInput, "dividend vector length must equal the dimension");
  }
  if (!std::isfinite(problem.rate) || !problem.dividends.allFinite()) {
    fail(Errc::kInvalidInput, "rate and dividends must be finite");
  }
  if (!(problem.maturity > 0.0) || !std::isfinite(problem.maturity)) {
    fail(Errc::kInvalidInput, "maturity must be positive");
  }
  if (problem.payoff.max_symbol() >= n) {
    fail(Errc::kInvalidInput, "payoff references S" + std::to_string(problem.payoff.max_symbol()) +
                                  " in a " + std::to_string(n) + "-asset problem");
  }
  if (!problem.names.empty() && static_cast<int>(problem.names.size()) != n) {
    fail(Errc::kInvalidInput, "name map length must equal the dimension");
  }
  require_psd(problem.cov, "covariance matrix");
}

MultiplicativeTransform::MultiplicativeTransform(std::vector<int> group, std::vector<double> alphas) {
  if (group.size() != alphas.size()) {
    fail(Errc::kInvalidInput, "group and exponent vectors differ in length");
  }
  if (group.size() < 2) fail(Errc::kInvalidInput, "a transform group needs at least two indices");
  std::vector<std::size_t> order(group.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return group[a] < group[b]; });
  for (std::size_t k : order) {
    group_.push_back(group[k]);
    alphas_.push_back(alphas[k]);
  }
  for (std::size_t k = 0; k < group_.size(); ++k) {
    if (group_[k] < 0) fail(Errc::kInvalidInput, "negative asset index");
    if (k > 0 && group_[k] == group_[k - 1]) fail(Errc::kInvalidInput, "repeated asset index");
    if (!std::isfinite(alphas_[k])) fail(Errc::kInvalidInput, "exponents must be finite");
  }
  if (std::all_of(alphas_.begin(), alphas_.end(), [](double a) { return a == 0.0; })) {
    fail(Errc::kInvalidInput, "at least one exponent must be nonzero");
  }
}

void MultiplicativeTransform::check_range(int dim) const {
  if (group_.back() >= dim) {
    fail(Errc::kInvalidInput, "transform index " + std::to_string(group_.back()) +
                                  " out of range for dimension " + std::to_string(dim));
  }
}

int MultiplicativeTransform::pivot() const noexcept {
  for (std::size_t k = 0; k < alphas_.size(); ++k) {
    if (alphas_[k] != 0.0) return static_cast<int>(k);
  }
  return 0;
}

double MultiplicativeTransform::apply(std::span<const double> s) const {
  double z = 1.0;
  for (std::size_t k = 0; k < group_.size(); ++k) {
    z *= std::pow(s[static_cast<std::size_t>(group_[k])], alphas_[k]);
  }
  return z;
}

bool MultiplicativeTransform::contains(int index) const noexcept {
  return std::find(group_.begin(), group_.end(), index) != group_.end();
}

double ParabolicProblem::payoff_at_log(std::span<const double> x) const {
  std::array<double, kMaxAssets> s{};
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = std::exp(x[i]);
  return payoff.eval(std::span<const double>(s.data(), x.size()));
}

}  // namespace bsreduce
