#include "bsreduce_cli/closed_form.hpp"

#include <cmath>

namespace bsreduce::cli {
namespace {

using Kind = PayoffExpr::Kind;

struct Monomial {
  double coefficient = 1.0;
  double power = 0.0;
};

/// c * S0^p built from constants, S0, products, quotients and powers.
std::optional<Monomial> monomial(const PayoffExpr& e) {
  switch (e.kind()) {
    case Kind::kSymbol:
      if (e.index() != 0) return std::nullopt;
      return Monomial{1.0, 1.0};
    case Kind::kConst: return Monomial{e.value(), 0.0};
    case Kind::kPow: {
      const auto base = monomial(e.children()[0]);
      if (!base || !(base->coefficient > 0.0)) return std::nullopt;
      return Monomial{std::pow(base->coefficient, e.value()), base->power * e.value()};
    }
    case Kind::kMul:
    case Kind::kDiv: {
      const auto lhs = monomial(e.children()[0]);
      const auto rhs = monomial(e.children()[1]);
      if (!lhs || !rhs) return std::nullopt;
      if (e.kind() == Kind::kMul) return Monomial{lhs->coefficient * rhs->coefficient, lhs->power + rhs->power};
      if (rhs->coefficient == 0.0) return std::nullopt;
      return Monomial{lhs->coefficient / rhs->coefficient, lhs->power - rhs->power};
    }
    default: return std::nullopt;
  }
}

bool is_const(const PayoffExpr& e) { return e.kind() == Kind::kConst; }

/// max(A, 0) or max(0, A): returns A.
std::optional<PayoffExpr> positive_part(const PayoffExpr& e) {
  if (e.kind() != Kind::kMax || e.children().size() != 2) return std::nullopt;
  const auto& a = e.children()[0];
  const auto& b = e.children()[1];
  if (is_const(b) && b.value() == 0.0) return a;
  if (is_const(a) && a.value() == 0.0) return b;
  return std::nullopt;
}

std::optional<PowerVanilla> match_linear(const PayoffExpr& a) {
  const auto make = [](const Monomial& m, double strike, OptionKind kind) -> std::optional<PowerVanilla> {
    if (!(m.coefficient > 0.0) || m.power == 0.0 || !(strike > 0.0)) return std::nullopt;
    return PowerVanilla{1.0, m.coefficient, m.power, strike, kind};
  };
  if (a.kind() == Kind::kSub) {
    const auto& lhs = a.children()[0];
    const auto& rhs = a.children()[1];
    if (is_const(rhs)) {
      if (const auto m = monomial(lhs)) return make(*m, rhs.value(), OptionKind::kCall);
    }
    if (is_const(lhs)) {
      if (const auto m = monomial(rhs)) return make(*m, lhs.value(), OptionKind::kPut);
    }
  }
  if (a.kind() == Kind::kAdd) {
    for (int k = 0; k < 2; ++k) {
      const auto& c = a.children()[static_cast<std::size_t>(k)];
      const auto& other = a.children()[static_cast<std::size_t>(1 - k)];
      if (!is_const(c)) continue;
      if (const auto m = monomial(other)) return make(*m, -c.value(), OptionKind::kCall);
    }
  }
  return std::nullopt;
}

}  // namespace

std::string PowerVanilla::pattern() const {
  return coefficient == 1.0 && power == 1.0 ? "vanilla" : "power_vanilla";
}

std::optional<PowerVanilla> match_power_vanilla(const PayoffExpr& payoff) {
  if (payoff.max_symbol() != 0) return std::nullopt;
  PayoffExpr inner = payoff;
  double scale = 1.0;
  if (payoff.kind() == Kind::kMul || payoff.kind() == Kind::kDiv) {
    const auto& lhs = payoff.children()[0];
    const auto& rhs = payoff.children()[1];
    if (is_const(rhs) && rhs.value() > 0.0) {
      scale = payoff.kind() == Kind::kMul ? rhs.value() : 1.0 / rhs.value();
      inner = lhs;
    } else if (payoff.kind() == Kind::kMul && is_const(lhs) && lhs.value() > 0.0) {
      scale = lhs.value();
      inner = rhs;
    }
  }
  const auto a = positive_part(inner);
  if (!a) return std::nullopt;
  auto m = match_linear(*a);
  if (m) m->scale = scale;
  return m;
}

double price_power_vanilla(const PowerVanilla& m, const BlackScholesProblem& problem, double spot) {
  const double r = problem.rate;
  const double q = problem.dividends(0);
  const double var = problem.cov(0, 0);
  const double p = m.power;
  double y0 = spot;
  double carry = q;
  if (!(m.coefficient == 1.0 && p == 1.0)) {
    y0 = m.coefficient * std::pow(spot, p);
    // Forward of S^p is S^p exp((p (r - q - var/2) + p^2 var / 2) T).
    if (p != 1.0) carry = r - p * (r - q - 0.5 * var) - 0.5 * p * p * var;
  }
  return m.scale *
         bs_vanilla(y0, m.strike, std::abs(p) * std::sqrt(var), r, carry, problem.maturity, m.kind);
}

}  // namespace bsreduce::cli
