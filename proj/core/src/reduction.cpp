#include "bsreduce/reduction.hpp"

#include <cmath>
#include <sstream>

#include "bsreduce/error.hpp"

namespace bsreduce {
namespace {

std::string format_exponent(double a) {
  std::ostringstream os;
  os.precision(12);
  os << a;
  return os.str();
}

std::string group_name(const BlackScholesProblem& problem, const MultiplicativeTransform& t) {
  std::string out;
  for (std::size_t k = 0; k < t.group().size(); ++k) {
    const double a = t.alphas()[k];
    if (a == 0.0) continue;
    if (!out.empty()) out += '*';
    const auto& name = problem.names.empty() ? "S" + std::to_string(t.group()[k])
                                             : problem.names[static_cast<std::size_t>(t.group()[k])];
    const bool compound = name.find_first_of("*/^") != std::string::npos;
    out += compound ? "(" + name + ")" : name;
    if (a != 1.0) out += "^" + format_exponent(a);
  }
  return out;
}

}  // namespace

BlackScholesProblem transform_coefficients(const BlackScholesProblem& problem,
                                           const MultiplicativeTransform& t,
                                           PayoffExpr reduced_payoff) {
  validate(problem);
  const int n = problem.dim();
  t.check_range(n);

  std::vector<int> rest;
  for (int i = 0; i < n; ++i) {
    if (!t.contains(i)) rest.push_back(i);
  }
  const int m = static_cast<int>(rest.size()) + 1;
  const auto& A = problem.cov;
  const double r = problem.rate;
  const auto& g = t.group();
  const auto& alpha = t.alphas();

  double a_zz = 0.0;
  double drift_sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) a_zz += A(g[i], g[j]) * alpha[i] * alpha[j];
    drift_sum += (r - problem.dividends[g[i]] - 0.5 * A(g[i], g[i])) * alpha[i];
  }

  Eigen::MatrixXd cov(m, m);
  Eigen::VectorXd q(m);
  cov(0, 0) = a_zz;
  q(0) = r - drift_sum - 0.5 * a_zz;
  for (int k = 1; k < m; ++k) {
    const int j = rest[static_cast<std::size_t>(k - 1)];
    double cross = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) cross += A(g[i], j) * alpha[i];
    cov(0, k) = cross;
    cov(k, 0) = cross;
    q(k) = problem.dividends[j];
    for (int l = 1; l < m; ++l) cov(k, l) = A(j, rest[static_cast<std::size_t>(l - 1)]);
  }

  BlackScholesProblem out;
  out.cov = std::move(cov);
  out.rate = r;
  out.dividends = std::move(q);
  out.maturity = problem.maturity;
  out.payoff = std::move(reduced_payoff);
  out.names.push_back(group_name(problem, t));
  for (int j : rest) {
    out.names.push_back(problem.names.empty() ? "S" + std::to_string(j)
                                              : problem.names[static_cast<std::size_t>(j)]);
  }
  require_psd(out.cov, "transformed covariance");
  if (out.payoff.max_symbol() >= m) {
    fail(Errc::kInvalidInput, "reduced payoff references an asset outside the reduced problem");
  }
  return out;
}

BlackScholesProblem apply_group_transform(const BlackScholesProblem& problem,
                                          const MultiplicativeTransform& t,
                                          const ProbeConfig& probe) {
  validate(problem);
  t.check_range(problem.dim());
  return transform_coefficients(problem, t, rewrite_payoff(problem.payoff, problem.dim(), t, probe));
}

BlackScholesProblem apply_pair_transform(const BlackScholesProblem& problem, int i0, int i1,
                                         double alpha0, double alpha1, const ProbeConfig& probe) {
  if (i0 == i1) fail(Errc::kInvalidInput, "pair transform needs two distinct indices");
  return apply_group_transform(problem, MultiplicativeTransform({i0, i1}, {alpha0, alpha1}), probe);
}

BlackScholesProblem apply_group_transform_pairwise(const BlackScholesProblem& problem,
                                                   const MultiplicativeTransform& t,
                                                   const ProbeConfig& probe) {
  validate(problem);
  t.check_range(problem.dim());
  const auto& g = t.group();
  const auto& alpha = t.alphas();

  // Positions shift after each fold: the running product sits at 0 and the
  // untouched assets keep their relative order.
  auto position_after = [&](std::size_t folded, int original) {
    int pos = 1;
    for (int i = 0; i < original; ++i) {
      bool consumed = false;
      for (std::size_t k = 0; k < folded; ++k) consumed = consumed || g[k] == i;
      if (!consumed) ++pos;
    }
    return pos;
  };

  std::vector<double> probe_center = probe.center;
  ProbeConfig step_probe = probe;
  BlackScholesProblem current =
      apply_pair_transform(problem, g[0], g[1], alpha[0], alpha[1], step_probe);
  if (!probe_center.empty()) {
    std::vector<double> next{std::pow(probe_center[static_cast<std::size_t>(g[0])], alpha[0]) *
                             std::pow(probe_center[static_cast<std::size_t>(g[1])], alpha[1])};
    for (int i = 0; i < problem.dim(); ++i) {
      if (i != g[0] && i != g[1]) next.push_back(probe_center[static_cast<std::size_t>(i)]);
    }
    probe_center = std::move(next);
  }
  for (std::size_t k = 2; k < g.size(); ++k) {
    const int pos = position_after(k, g[k]);
    step_probe.center = probe_center;
    current = apply_pair_transform(current, 0, pos, 1.0, alpha[k], step_probe);
    if (!probe_center.empty()) {
      std::vector<double> next{probe_center[0] *
                               std::pow(probe_center[static_cast<std::size_t>(pos)], alpha[k])};
      for (std::size_t i = 1; i < probe_center.size(); ++i) {
        if (static_cast<int>(i) != pos) next.push_back(probe_center[i]);
      }
      probe_center = std::move(next);
    }
  }
  current.names[0] = group_name(problem, t);
  return current;
}

BlackScholesProblem apply_numeraire_change(const BlackScholesProblem& problem, int numeraire,
                                           const ProbeConfig& probe) {
  validate(problem);
  const int n = problem.dim();
  if (numeraire < 0 || numeraire >= n) fail(Errc::kInvalidInput, "numeraire index out of range");
  if (n < 2) fail(Errc::kInvalidInput, "a numeraire change needs at least two assets");
  if (!check_homogeneity(problem.payoff, n, probe)) {
    fail(Errc::kNotHomogeneous,
         "payoff " + problem.payoff.to_string() + " is not positively homogeneous of degree 1");
  }

  std::vector<int> rest;
  for (int i = 0; i < n; ++i) {
    if (i != numeraire) rest.push_back(i);
  }
  const int m = n - 1;
  const auto& A = problem.cov;
  const int k = numeraire;
  Eigen::MatrixXd cov(m, m);
  Eigen::VectorXd q(m);
  for (int a = 0; a < m; ++a) {
    const int i = rest[static_cast<std::size_t>(a)];
    q(a) = problem.dividends[i];
    for (int b = 0; b < m; ++b) {
      const int j = rest[static_cast<std::size_t>(b)];
      cov(a, b) = A(i, j) - A(i, k) - A(k, j) + A(k, k);
    }
  }

  BlackScholesProblem out;
  out.cov = std::move(cov);
  out.rate = problem.dividends[k];
  out.dividends = std::move(q);
  out.maturity = problem.maturity;
  out.payoff = numeraire_payoff(problem.payoff, n, numeraire);
  const auto name_of = [&](int i) {
    return problem.names.empty() ? "S" + std::to_string(i) : problem.names[static_cast<std::size_t>(i)];
  };
  for (int i : rest) out.names.push_back(name_of(i) + "/" + name_of(k));
  require_psd(out.cov, "numeraire-reduced covariance");
  return out;
}

ParabolicProblem to_log_parabolic(const BlackScholesProblem& problem) {
  validate(problem);
  ParabolicProblem out;
  out.diffusion = problem.cov;
  out.drift = Eigen::VectorXd::Constant(problem.dim(), problem.rate) - problem.dividends -
              0.5 * problem.cov.diagonal();
  out.discount = problem.rate;
  out.maturity = problem.maturity;
  out.payoff = problem.payoff;
  return out;
}

Eigen::MatrixXd log_space_map(int dim, const MultiplicativeTransform& t) {
  t.check_range(dim);
  const int m = dim - t.size() + 1;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, dim);
  for (std::size_t k = 0; k < t.group().size(); ++k) T(0, t.group()[k]) = t.alphas()[k];
  int row = 1;
  for (int i = 0; i < dim; ++i) {
    if (!t.contains(i)) T(row++, i) = 1.0;
  }
  return T;
}

std::vector<std::string> exponent_warnings(const MultiplicativeTransform& t) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < t.group().size(); ++k) {
    if (std::abs(t.alphas()[k]) > kLargeExponentWarning) {
      out.push_back("exponent " + format_exponent(t.alphas()[k]) + " on S" +
                    std::to_string(t.group()[k]) + " exceeds 10 in magnitude");
    }
  }
  return out;
}

}  // namespace bsreduce
