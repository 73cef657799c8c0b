#pragma once

#include <optional>
#include <string>

#include "bsreduce/payoff.hpp"
#include "bsreduce/pricers.hpp"
#include "bsreduce/problem.hpp"

namespace bsreduce::cli {

/// scale * max(c S^p - K, 0) (call) or scale * max(K - c S^p, 0) (put) over
/// a single asset. Under lognormal S the power c S^p is lognormal too, so
/// these price with bs_vanilla.
struct PowerVanilla {
  double scale = 1.0;
  double coefficient = 1.0;
  double power = 1.0;
  double strike = 0.0;
  OptionKind kind = OptionKind::kCall;

  /// "vanilla" for c = p = 1, "power_vanilla" otherwise.
  [[nodiscard]] std::string pattern() const;
};

/// Recognizes the shapes above in a one-asset payoff tree.
std::optional<PowerVanilla> match_power_vanilla(const PayoffExpr& payoff);

/// Price of the matched payoff for a one-asset problem at `spot`.
double price_power_vanilla(const PowerVanilla& m, const BlackScholesProblem& problem, double spot);

}  // namespace bsreduce::cli
