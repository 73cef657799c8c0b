#include "bsreduce/normal.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

#include "bsreduce/error.hpp"

namespace bsreduce {

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double norm_inv(double u) {
  if (!(u > 0.0 && u < 1.0)) fail(Errc::kInvalidInput, "norm_inv argument must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

}  // namespace bsreduce
