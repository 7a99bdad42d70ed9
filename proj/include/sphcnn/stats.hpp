#pragma once

#include <span>

namespace sphcnn {

/// Least-squares slope of log(y) against log(x). Requires >= 2 points, x > 0, y > 0.
double loglog_slope(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);

/// Sample standard deviation of the mean (n - 1 denominator); 0 for n < 2.
double standard_error(std::span<const double> v);

}  // namespace sphcnn
