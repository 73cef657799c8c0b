#pragma once

#include <functional>
#include <vector>

namespace bsreduce {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule; nodes from Newton iteration on P_n. Cached per n.
const GaussLegendreRule& gauss_legendre(int n);

double integrate_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                int n = 64);

}  // namespace bsreduce
