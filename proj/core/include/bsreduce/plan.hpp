#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bsreduce/problem.hpp"
#include "bsreduce/structure.hpp"

namespace bsreduce {

struct ReductionStep {
  enum class Kind { kProduct, kNumeraire };

  Kind kind = Kind::kProduct;
  /// Set for product steps.
  std::optional<MultiplicativeTransform> transform;
  /// Set for numeraire steps.
  int numeraire = -1;
  std::vector<std::string> warnings;

  /// Dimensions removed by this step.
  [[nodiscard]] int reduction() const noexcept {
    return kind == Kind::kNumeraire ? 1 : transform->size() - 1;
  }
};

/// Spot values of the reduced problem plus the factor converting its price
/// back into the original one (product of numeraire spots).
struct ReducedSpots {
  std::vector<double> spots;
  double multiplier = 1.0;
};

/// Ordered reduction steps; states[k] is the problem after steps[k].
struct ReductionPlan {
  BlackScholesProblem initial;
  std::vector<ReductionStep> steps;
  std::vector<BlackScholesProblem> states;

  [[nodiscard]] const BlackScholesProblem& final_problem() const noexcept {
    return states.empty() ? initial : states.back();
  }
  [[nodiscard]] bool empty() const noexcept { return steps.empty(); }

  /// Pushes original spots through every step.
  [[nodiscard]] ReducedSpots map_spots(std::span<const double> spots) const;
};

struct PlanOptions {
  ProbeConfig probe;
  /// Largest product group tried directly (pairs, then triples, ...).
  int max_group_size = 4;
  bool allow_numeraire = true;
  /// Negative-control hook: overrides the exponents of the first product
  /// step in the coefficient algebra and spot map. The payoff rewrite still
  /// uses the detected exponents, so the reduced problem is deliberately
  /// inconsistent with the original.
  std::vector<double> force_alpha;
};

/// Greedy planner. Repeatedly searches index groups in lexicographic order
/// (pairs first, then larger groups) for product structure and applies the
/// first hit; then, when the payoff is homogeneous and dim >= 2, changes
/// numeraire to asset 0 and searches for product structure once more.
ReductionPlan plan_reduction(const BlackScholesProblem& problem, const PlanOptions& options = {});

}  // namespace bsreduce
