#pragma once

namespace bsreduce {

/// Standard normal CDF via erfc; absolute error below 1e-15.
double norm_cdf(double x) noexcept;
double norm_pdf(double x) noexcept;
/// Inverse CDF for u in (0, 1).
double norm_inv(double u);

}  // namespace bsreduce
