#include "bsreduce/structure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>

#include "bsreduce/error.hpp"

namespace bsreduce {
namespace {

constexpr std::array<int, kMaxAssets> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19,
                                                 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(int base, long long index) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

double max_abs_payoff(const PayoffExpr& expr, const std::vector<std::vector<double>>& pts) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, std::abs(expr.eval(p)));
  return m;
}

bool close(double a, double b, double rel, double abs_floor) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

/// P evaluated at exp(x).
double eval_log(const PayoffExpr& expr, std::span<const double> x) {
  std::array<double, kMaxAssets> s{};
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = std::exp(x[i]);
  return expr.eval(std::span<const double>(s.data(), x.size()));
}

/// Rational p/q (q <= 64) within 1e-7 of a, else a itself.
double snap(double a) {
  if (a == 0.0) return 0.0;
  for (int q = 1; q <= 64; ++q) {
    const double p = std::round(a * q);
    if (std::abs(a - p / q) <= 1e-7 * std::max(1.0, std::abs(a))) return p / q;
  }
  return a;
}

/// Exponents of `e` over every symbol when it is a product of powers of
/// symbols and constants; empty otherwise.
std::optional<std::array<double, kMaxAssets>> monomial_exponents(const PayoffExpr& e) {
  using Kind = PayoffExpr::Kind;
  std::array<double, kMaxAssets> out{};
  switch (e.kind()) {
    case Kind::kSymbol: out[static_cast<std::size_t>(e.index())] = 1.0; return out;
    case Kind::kConst: return out;
    case Kind::kPow: {
      auto base = monomial_exponents(e.children()[0]);
      if (!base) return std::nullopt;
      for (double& v : *base) v *= e.value();
      return base;
    }
    case Kind::kMul:
    case Kind::kDiv: {
      const double sign = e.kind() == Kind::kDiv ? -1.0 : 1.0;
      bool first = true;
      for (const auto& c : e.children()) {
        const auto sub = monomial_exponents(c);
        if (!sub) return std::nullopt;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += (first ? 1.0 : sign) * (*sub)[i];
        first = false;
      }
      return out;
    }
    default: return std::nullopt;
  }
}

/// Exponent vectors on `candidate` of every monomial subtree, normalized so
/// entry `lead` is 1.
void collect_monomials(const PayoffExpr& e, std::span<const int> candidate, std::size_t lead,
                       std::vector<std::vector<double>>& out) {
  if (const auto m = monomial_exponents(e)) {
    const double pivot = (*m)[static_cast<std::size_t>(candidate[lead])];
    if (pivot != 0.0) {
      std::vector<double> v(candidate.size());
      for (std::size_t j = 0; j < candidate.size(); ++j) {
        v[j] = (*m)[static_cast<std::size_t>(candidate[j])] / pivot;
      }
      out.push_back(std::move(v));
    }
  }
  for (const auto& c : e.children()) collect_monomials(c, candidate, lead, out);
}

/// Orthonormal basis of the complement of `alpha` in R^k.
std::vector<std::vector<double>> orthogonal_complement(const std::vector<double>& alpha) {
  const std::size_t k = alpha.size();
  double norm2 = 0.0;
  for (double a : alpha) norm2 += a * a;
  std::vector<std::vector<double>> basis;
  for (std::size_t j = 0; j < k && basis.size() + 1 < k; ++j) {
    std::vector<double> v(k, 0.0);
    v[j] = 1.0;
    for (std::size_t i = 0; i < k; ++i) v[i] -= alpha[j] * alpha[i] / norm2;
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < k; ++i) dot += v[i] * b[i];
      for (std::size_t i = 0; i < k; ++i) v[i] -= dot * b[i];
    }
    double n = 0.0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    if (n < 1e-8) continue;
    for (double& c : v) c /= n;
    basis.push_back(std::move(v));
  }
  return basis;
}

bool invariant_along_complement(const PayoffExpr& expr, std::span<const int> candidate,
                                const std::vector<double>& alpha,
                                const std::vector<std::vector<double>>& pts, double tol,
                                double abs_floor) {
  const auto basis = orthogonal_complement(alpha);
  std::vector<double> x;
  std::vector<double> shifted;
  for (const auto& p : pts) {
    x.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) x[i] = std::log(p[i]);
    const double f0 = eval_log(expr, x);
    for (const auto& d : basis) {
      for (double step : {0.3, -0.3}) {
        shifted = x;
        for (std::size_t j = 0; j < candidate.size(); ++j) {
          shifted[static_cast<std::size_t>(candidate[j])] += step * d[j];
        }
        if (!close(f0, eval_log(expr, shifted), tol, abs_floor)) return false;
      }
    }
  }
  return true;
}

void check_candidate(std::span<const int> candidate, int dim) {
  if (candidate.size() < 2) fail(Errc::kInvalidInput, "candidate group needs at least two indices");
  std::set<int> seen;
  for (int i : candidate) {
    if (i < 0 || i >= dim) fail(Errc::kInvalidInput, "candidate index out of range");
    if (!seen.insert(i).second) fail(Errc::kInvalidInput, "repeated candidate index");
  }
}

}  // namespace

std::vector<std::vector<double>> probe_points(int dim, int count, const ProbeConfig& config,
                                              int offset) {
  if (dim < 1 || dim > kMaxAssets) fail(Errc::kInvalidInput, "probe dimension out of range");
  if (!config.center.empty() && static_cast<int>(config.center.size()) != dim) {
    fail(Errc::kInvalidInput, "probe center length must equal the dimension");
  }
  if (!(config.lo > 0.0) || !(config.hi > config.lo)) {
    fail(Errc::kInvalidInput, "probe range must satisfy 0 < lo < hi");
  }
  const double log_lo = std::log(config.lo);
  const double log_span = std::log(config.hi) - log_lo;
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count),
                                       std::vector<double>(static_cast<std::size_t>(dim)));
  for (int k = 0; k < count; ++k) {
    for (int i = 0; i < dim; ++i) {
      const double u = radical_inverse(kPrimes[static_cast<std::size_t>(i)], k + offset);
      const double c = config.center.empty() ? 1.0 : config.center[static_cast<std::size_t>(i)];
      pts[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
          c * std::exp(log_lo + u * log_span);
    }
  }
  return pts;
}

bool check_homogeneity(const PayoffExpr& expr, int dim, const ProbeConfig& config) {
  if (expr.max_symbol() >= dim) fail(Errc::kInvalidInput, "payoff references an unknown asset");
  const auto pts = probe_points(dim, std::max(config.points, 64), config);
  const double m = max_abs_payoff(expr, pts);
  if (m == 0.0) return false;
  const double abs_floor = 1e-13 * m;
  std::vector<double> scaled;
  for (const auto& p : pts) {
    const double base = expr.eval(p);
    for (double a : {0.5, 2.0, 3.7}) {
      scaled = p;
      for (double& v : scaled) v *= a;
      if (!close(expr.eval(scaled), a * base, config.tol, a * abs_floor)) return false;
    }
  }
  return true;
}

std::optional<GroupStructure> detect_group_structure(const PayoffExpr& expr, int dim,
                                                     std::span<const int> candidate,
                                                     const ProbeConfig& config) {
  check_candidate(candidate, dim);
  if (expr.max_symbol() >= dim) fail(Errc::kInvalidInput, "payoff references an unknown asset");

  const int n_points = std::max(config.points, 64);
  const auto validation = probe_points(dim, n_points, config);
  const double m = max_abs_payoff(expr, validation);
  if (m == 0.0) return std::nullopt;
  const double abs_floor = 1e-12 * m;

  // Reference gradient in log coordinates, skipping flat regions and kinks.
  const auto references = probe_points(dim, n_points, config, 1 + 7919);
  const double h = config.fd_step;
  std::vector<double> gradient;
  int kinks = 0;
  for (const auto& p : references) {
    std::vector<double> x(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) x[i] = std::log(p[i]);
    const double f0 = eval_log(expr, x);
    std::vector<double> g(candidate.size());
    bool kinked = false;
    for (std::size_t j = 0; j < candidate.size(); ++j) {
      const auto idx = static_cast<std::size_t>(candidate[j]);
      auto xp = x;
      auto xm = x;
      xp[idx] += h;
      xm[idx] -= h;
      const double fp = eval_log(expr, xp);
      const double fm = eval_log(expr, xm);
      const double fwd = (fp - f0) / h;
      const double bwd = (f0 - fm) / h;
      if (!close(fwd, bwd, 1e-3, 1e-9 * m)) kinked = true;
      g[j] = (fp - fm) / (2.0 * h);
    }
    if (kinked) {
      if (++kinks > config.kink_retries) {
        fail(Errc::kNonDifferentiableKink,
             "probe points keep straddling a max/min kink; widen or move the probe domain");
      }
      continue;
    }
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax <= 1e-9 * m) continue;
    gradient = std::move(g);
    break;
  }
  if (gradient.empty()) return std::nullopt;

  double gmax = 0.0;
  for (double v : gradient) gmax = std::max(gmax, std::abs(v));
  std::size_t lead = 0;
  while (std::abs(gradient[lead]) <= 1e-9 * gmax) ++lead;
  std::vector<double> raw(gradient.size());
  for (std::size_t j = 0; j < gradient.size(); ++j) {
    raw[j] = std::abs(gradient[j]) <= 1e-9 * gmax ? 0.0 : gradient[j] / gradient[lead];
  }
  std::vector<double> snapped(raw.size());
  std::transform(raw.begin(), raw.end(), snapped.begin(), snap);

  // The difference quotients are only good to about 1e-10; an exponent
  // vector read off a monomial in the tree that agrees with them is exact.
  std::vector<double> structural = raw;
  std::vector<std::vector<double>> monomials;
  collect_monomials(expr, candidate, lead, monomials);
  for (const auto& v : monomials) {
    bool agrees = true;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (std::abs(v[j] - raw[j]) > 1e-6 * std::max(1.0, std::abs(raw[j]))) agrees = false;
    }
    if (agrees) {
      structural = v;
      break;
    }
  }

  for (const auto* alpha : {&snapped, &structural, &raw}) {
    if (alpha != &snapped && *alpha == snapped) continue;
    if (alpha == &raw && raw == structural) continue;
    if (!invariant_along_complement(expr, candidate, *alpha, validation, config.tol, abs_floor)) {
      continue;
    }
    try {
      MultiplicativeTransform t(std::vector<int>(candidate.begin(), candidate.end()), *alpha);
      GroupStructure out{t.group(), t.alphas(), rewrite_payoff(expr, dim, t, config)};
      return out;
    } catch (const Error& e) {
      if (e.code() != Errc::kPayoffNotReducible) throw;
    }
  }
  return std::nullopt;
}

PayoffExpr rewrite_payoff(const PayoffExpr& expr, int dim, const MultiplicativeTransform& t,
                          const ProbeConfig& config) {
  t.check_range(dim);
  const auto pivot = static_cast<std::size_t>(t.pivot());
  const int pivot_index = t.group()[pivot];
  const double pivot_alpha = t.alphas()[pivot];

  std::vector<int> new_index(static_cast<std::size_t>(dim), -1);
  int next = 1;
  for (int i = 0; i < dim; ++i) {
    if (!t.contains(i)) new_index[static_cast<std::size_t>(i)] = next++;
  }

  const PayoffExpr z = PayoffExpr::symbol(0);
  const PayoffExpr rewritten = simplify(expr.substitute([&](int i) {
    if (i == pivot_index) return pivot_alpha == 1.0 ? z : PayoffExpr::pow(z, 1.0 / pivot_alpha);
    if (t.contains(i)) return PayoffExpr::constant(1.0);
    return PayoffExpr::symbol(new_index[static_cast<std::size_t>(i)]);
  }));

  const auto pts = probe_points(dim, 256, config, 1 + 104729);
  const double m = max_abs_payoff(expr, pts);
  std::vector<double> reduced(static_cast<std::size_t>(next));
  for (const auto& p : pts) {
    reduced[0] = t.apply(p);
    for (int i = 0; i < dim; ++i) {
      const int k = new_index[static_cast<std::size_t>(i)];
      if (k > 0) reduced[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(i)];
    }
    const double expected = expr.eval(p);
    const double got = rewritten.eval(reduced);
    if (!close(expected, got, 1e-12, 1e-13 * m)) {
      fail(Errc::kPayoffNotReducible,
           "payoff " + expr.to_string() + " is not a function of the transformed group");
    }
  }
  return rewritten;
}

PayoffExpr numeraire_payoff(const PayoffExpr& expr, int dim, int numeraire) {
  if (numeraire < 0 || numeraire >= dim) fail(Errc::kInvalidInput, "numeraire index out of range");
  return simplify(expr.substitute([&](int i) {
    if (i == numeraire) return PayoffExpr::constant(1.0);
    return PayoffExpr::symbol(i < numeraire ? i : i - 1);
  }));
}

}  // namespace bsreduce
