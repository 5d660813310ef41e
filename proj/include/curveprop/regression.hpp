#pragma once

#include <span>

namespace curveprop {

struct LineFit
{
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square of the residuals y - (slope*x + intercept).
  double residual = 0.0;
};

/// Ordinary least squares y ~ slope*x + intercept. Throws DegenerateData
/// for fewer than two points or constant x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares in log-log space; all inputs must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

} // namespace curveprop
