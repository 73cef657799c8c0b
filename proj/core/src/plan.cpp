#include "bsreduce/plan.hpp"

#include <algorithm>
#include <numeric>

#include "bsreduce/error.hpp"
#include "bsreduce/reduction.hpp"

namespace bsreduce {
namespace {

std::vector<double> map_product(std::span<const double> s, const MultiplicativeTransform& t) {
  std::vector<double> out{t.apply(s)};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!t.contains(static_cast<int>(i))) out.push_back(s[i]);
  }
  return out;
}

std::vector<double> map_numeraire(std::span<const double> s, int numeraire) {
  std::vector<double> out;
  const double base = s[static_cast<std::size_t>(numeraire)];
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (static_cast<int>(i) != numeraire) out.push_back(s[i] / base);
  }
  return out;
}

/// Calls visit(indices) for each k-subset of [0, n) in lexicographic order
/// until visit returns true.
template <typename Visit>
bool for_each_combination(int n, int k, Visit&& visit) {
  if (k > n) return false;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    if (visit(std::span<const int>(idx))) return true;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

class Planner {
 public:
  Planner(const BlackScholesProblem& problem, const PlanOptions& options)
      : options_(options), probe_(options.probe) {
    plan_.initial = problem;
    if (plan_.initial.names.empty()) {
      for (int i = 0; i < problem.dim(); ++i) plan_.initial.names.push_back("S" + std::to_string(i));
    }
    validate(plan_.initial);
  }

  ReductionPlan run() {
    product_pass();
    if (options_.allow_numeraire && current().dim() >= 2 &&
        check_homogeneity(current().payoff, current().dim(), probe_)) {
      const int numeraire = 0;
      ReductionStep step;
      step.kind = ReductionStep::Kind::kNumeraire;
      step.numeraire = numeraire;
      plan_.states.push_back(apply_numeraire_change(current(), numeraire, probe_));
      plan_.steps.push_back(std::move(step));
      if (!probe_.center.empty()) probe_.center = map_numeraire(probe_.center, numeraire);
      product_pass();
    }
    return std::move(plan_);
  }

 private:
  const BlackScholesProblem& current() const { return plan_.final_problem(); }

  void product_pass() {
    for (;;) {
      const int dim = current().dim();
      bool applied = false;
      for (int k = 2; k <= std::min(dim, options_.max_group_size) && !applied; ++k) {
        applied = for_each_combination(dim, k, [&](std::span<const int> candidate) {
          std::optional<GroupStructure> found;
          try {
            found = detect_group_structure(current().payoff, dim, candidate, probe_);
          } catch (const Error& e) {
            if (e.code() != Errc::kNonDifferentiableKink) throw;
          }
          if (!found) return false;
          apply_product(*found);
          return true;
        });
      }
      if (!applied) return;
    }
  }

  void apply_product(const GroupStructure& found) {
    MultiplicativeTransform detected(found.group, found.alphas);
    ReductionStep step;
    step.kind = ReductionStep::Kind::kProduct;
    const bool forced = !options_.force_alpha.empty() && !forced_used_;
    if (forced) {
      if (options_.force_alpha.size() != found.group.size()) {
        fail(Errc::kInvalidInput, "forced exponent count does not match the detected group size " +
                                      std::to_string(found.group.size()));
      }
      forced_used_ = true;
      MultiplicativeTransform wrong(found.group, options_.force_alpha);
      plan_.states.push_back(transform_coefficients(current(), wrong, found.residual));
      step.warnings.push_back("exponents forced; reduced problem is not equivalent");
      step.transform = wrong;
    } else {
      plan_.states.push_back(transform_coefficients(current(), detected, found.residual));
      step.transform = detected;
    }
    for (auto& w : exponent_warnings(*step.transform)) step.warnings.push_back(std::move(w));
    if (!probe_.center.empty()) probe_.center = map_product(probe_.center, *step.transform);
    plan_.steps.push_back(std::move(step));
  }

  const PlanOptions& options_;
  ProbeConfig probe_;
  ReductionPlan plan_;
  bool forced_used_ = false;
};

}  // namespace

ReducedSpots ReductionPlan::map_spots(std::span<const double> spots) const {
  if (static_cast<int>(spots.size()) != initial.dim()) {
    fail(Errc::kInvalidInput, "expected " + std::to_string(initial.dim()) + " spot values");
  }
  for (double s : spots) {
    if (!(s > 0.0)) fail(Errc::kInvalidInput, "spot values must be strictly positive");
  }
  ReducedSpots out{std::vector<double>(spots.begin(), spots.end()), 1.0};
  for (const auto& step : steps) {
    if (step.kind == ReductionStep::Kind::kProduct) {
      out.spots = map_product(out.spots, *step.transform);
    } else {
      out.multiplier *= out.spots[static_cast<std::size_t>(step.numeraire)];
      out.spots = map_numeraire(out.spots, step.numeraire);
    }
  }
  return out;
}

ReductionPlan plan_reduction(const BlackScholesProblem& problem, const PlanOptions& options) {
  return Planner(problem, options).run();
}

}  // namespace bsreduce
