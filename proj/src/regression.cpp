#include "curveprop/regression.hpp"

#include "curveprop/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace curveprop {

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size())
    throw InvalidArgument("fit_line: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2)
    throw DegenerateData("fit_line: need at least two points");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    throw DegenerateData("fit_line: abscissae are all equal");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size())
    throw InvalidArgument("fit_loglog: x and y differ in length");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw DegenerateData("fit_loglog: non-positive value at index " + std::to_string(i));
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

} // namespace curveprop
