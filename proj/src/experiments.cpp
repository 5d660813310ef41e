#include "curveprop/experiments.hpp"

#include "curveprop/errors.hpp"
#include "curveprop/regression.hpp"
#include "curveprop/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace curveprop {

namespace {

constexpr double noise_floor = 1e-14;

std::vector<cplx> values_at_zero(const SpectralField& field, std::span<const std::vector<double>> bases)
{
  std::vector<cplx> out(bases.size());
  for (std::size_t j = 0; j < bases.size(); ++j)
    out[j] = point_eval(field, bases[j]);
  return out;
}

int tiling_order(const Symbol& sym) { return sym.kind() == SymbolKind::polynomial2d ? sym.m1() : 2; }

} // namespace

ErrorCurve error_curve(const SpectralField& field, const Symbol& sym, const Curve& curve,
                       std::span<const std::vector<double>> bases, std::span<const double> times, CurveMethod method)
{
  if (bases.empty())
    throw InvalidArgument("error_curve: no base points");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0 && times[i] <= 1.0))
      throw InvalidArgument("error_curve: times must lie in (0, 1]");
    if (i > 0 && !(times[i] < times[i - 1]))
      throw InvalidArgument("error_curve: times must be strictly decreasing");
  }
  const auto f0 = values_at_zero(field, bases);
  ErrorCurve ec;
  ec.times.assign(times.begin(), times.end());
  ec.method = method;
  for (double t : times) {
    const auto ev = evolve_along_curve(field, sym, curve, bases, t, method);
    ec.method = ev.method;
    double sum = 0.0;
    for (std::size_t j = 0; j < bases.size(); ++j)
      sum += std::norm(ev.values[j] - f0[j]);
    ec.values.push_back(std::sqrt(sum / static_cast<double>(bases.size())));
  }
  return ec;
}

std::vector<double> dyadic_times(int first, int last)
{
  if (first < 0 || last < first)
    throw InvalidArgument("dyadic_times: need 0 <= first <= last");
  std::vector<double> t;
  for (int j = first; j <= last; ++j)
    t.push_back(std::ldexp(1.0, -j));
  return t;
}

FitWindow time_window(const ErrorCurve& ec, double t_min, double t_max)
{
  FitWindow w{ec.times.size(), 0};
  for (std::size_t i = 0; i < ec.times.size(); ++i)
    if (ec.times[i] >= t_min && ec.times[i] <= t_max) {
      w.begin = std::min(w.begin, i);
      w.end = std::max(w.end, i + 1);
    }
  if (w.end == 0)
    w.begin = 0;
  return w;
}

RateFit fit_rate(const ErrorCurve& ec, FitWindow window)
{
  if (ec.times.size() != ec.values.size())
    throw InvalidArgument("fit_rate: times and values differ in length");
  if (window.end > ec.times.size() || window.begin >= window.end || window.end - window.begin < 4)
    throw InvalidArgument("fit_rate: window must contain at least 4 points");
  std::vector<double> t, e;
  for (std::size_t i = window.begin; i < window.end; ++i) {
    if (!(ec.values[i] > noise_floor))
      throw NoiseFloorError("fit_rate: E(t) = " + std::to_string(ec.values[i]) + " at t = " + std::to_string(ec.times[i]) +
                                " is at the noise floor",
                            ec.times[i]);
    t.push_back(ec.times[i]);
    e.push_back(ec.values[i]);
  }
  const auto line = fit_loglog(t, e);
  return {line.slope, line.residual, window};
}

RateFit fit_rate(const ErrorCurve& ec) { return fit_rate(ec, FitWindow{0, ec.times.size()}); }

double predicted_rate(double alpha, double delta, double m)
{
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidArgument("predicted_rate: alpha must lie in (0, 1]");
  if (!(m >= 1.0))
    throw InvalidArgument("predicted_rate: m must be >= 1");
  if (!(delta >= 0.0 && delta < m))
    throw InvalidArgument("predicted_rate: delta must satisfy 0 <= delta < m");
  return alpha * delta / m;
}

double predicted_rate_polynomial2d(int m1, int m2, double delta)
{
  if (m1 < 2 || m2 < m1)
    throw InvalidArgument("predicted_rate: polynomial2d needs 2 <= m1 <= m2");
  if (!(delta >= 0.0 && delta < m2))
    throw InvalidArgument("predicted_rate: delta must satisfy 0 <= delta < m2");
  return delta / ((m1 - 1.0) * m2);
}

std::vector<std::vector<double>> ball_lattice(const Ball& ball, int target)
{
  const int n = ball.dimension();
  if (n < 1 || !(ball.radius > 0.0))
    throw InvalidArgument("ball_lattice: ball needs a center and positive radius");
  if (target < 1)
    throw InvalidArgument("ball_lattice: need at least one point");
  const double spacing = std::pow(ball.volume() / target, 1.0 / n);
  const int per_axis = static_cast<int>(std::ceil(2.0 * ball.radius / spacing)) + 1;
  const double start = -spacing * (per_axis - 1) / 2.0;

  std::vector<std::vector<double>> pts;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> p(static_cast<std::size_t>(n));
  for (;;) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
      const double off = start + spacing * idx[a];
      p[a] = ball.center[a] + off;
      r2 += off * off;
    }
    if (r2 <= ball.radius * ball.radius)
      pts.push_back(p);
    std::size_t a = 0;
    while (a < idx.size() && ++idx[a] == per_axis)
      idx[a++] = 0;
    if (a == idx.size())
      break;
  }
  if (pts.empty())
    pts.push_back(ball.center);
  return pts;
}

std::vector<double> maximal_time_grid(int log_points, std::optional<double> lambda, int m1)
{
  if (log_points < 64)
    throw InvalidArgument("maximal_time_grid: need at least 64 log-spaced times");
  std::vector<double> t;
  for (int i = 0; i < log_points; ++i)
    t.push_back(std::pow(10.0, -4.0 + 4.0 * i / log_points));
  if (lambda) {
    const auto tiling = time_intervals(*lambda, m1);
    for (const auto& iv : tiling.intervals)
      if (iv.start > 0.0 && iv.start < 1.0)
        t.push_back(iv.start);
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

MaximalEstimate maximal_lp(const SpectralField& field, const Symbol& sym, const Curve& curve, const Ball& ball,
                           double p, std::span<const double> t_grid, int space_points)
{
  if (!(p >= 1.0) || !std::isfinite(p))
    throw InvalidArgument("maximal_lp: p must be >= 1");
  if (t_grid.empty())
    throw InvalidArgument("maximal_lp: empty time grid");
  if (ball.dimension() != field.dimension())
    throw InvalidArgument("maximal_lp: ball dimension does not match the field");
  const auto pts = ball_lattice(ball, space_points);
  const double w = ball.volume() / static_cast<double>(pts.size());

  MaximalEstimate est;
  est.p = p;
  est.time_points = t_grid.size();
  est.space_points = pts.size();
  std::vector<double> sup(pts.size(), 0.0);
  for (double t : t_grid) {
    const auto ev = evolve_along_curve(field, sym, curve, pts, t);
    double sum = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double a = std::abs(ev.values[j]);
      sup[j] = std::max(sup[j], a);
      sum += w * std::pow(a, p);
    }
    est.fixed_time_norms.push_back(std::pow(sum, 1.0 / p));
  }
  double sum = 0.0;
  for (double s : sup)
    sum += w * std::pow(s, p);
  est.value = std::pow(sum, 1.0 / p);
  return est;
}

double sweep_slope(std::span<const double> lambdas, std::span<const double> mean_ratios)
{
  return fit_loglog(lambdas, mean_ratios).slope;
}

SweepResult exponent_sweep(const FrequencyGrid& grid, const Symbol& sym, const Curve& curve,
                           std::span<const double> lambdas, std::span<const std::uint64_t> seeds,
                           const SweepOptions& options)
{
  if (lambdas.size() < 3)
    throw InvalidArgument("exponent_sweep: need at least 3 lambda values");
  if (seeds.size() < 8)
    throw InvalidArgument("exponent_sweep: need at least 8 seeds");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double l2 = std::log2(lambdas[i]);
    if (!(lambdas[i] >= 1.0) || std::abs(l2 - std::round(l2)) > 1e-12)
      throw InvalidArgument("exponent_sweep: lambda values must be powers of two");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
      throw InvalidArgument("exponent_sweep: lambda values must increase");
  }

  SweepResult res;
  for (double lambda : lambdas) {
    const auto tgrid = maximal_time_grid(options.log_time_points, lambda, tiling_order(sym));
    double total = 0.0;
    for (auto seed : seeds) {
      const auto f = make_band_limited_random(grid, lambda, seed);
      const auto est = maximal_lp(f, sym, curve, options.ball, options.p, tgrid, options.space_points);
      const double ratio = est.value / spectral_l2_norm(f);
      res.samples.push_back({lambda, seed, ratio});
      total += ratio;
    }
    res.lambdas.push_back(lambda);
    res.mean_ratios.push_back(total / static_cast<double>(seeds.size()));
  }
  res.slope = sweep_slope(res.lambdas, res.mean_ratios);
  return res;
}

LowerBoundResult lower_bound_check(const SpectralField& field, const Symbol& sym, double alpha,
                                   std::span<const std::vector<double>> bases, std::span<const double> times)
{
  if (spectral_max(field) == 0.0)
    throw InvalidArgument("lower_bound_check: field is numerically zero");
  if (bases.empty())
    throw InvalidArgument("lower_bound_check: no base points");
  const int n = field.dimension();
  std::vector<double> e1(static_cast<std::size_t>(n), 0.0);
  e1[0] = 1.0;
  const auto curve = Curve::shift(e1, alpha);

  std::vector<double> ts(times.begin(), times.end());
  if (ts.empty())
    ts = dyadic_times(6, 16);
  if (ts.size() < 3)
    throw InvalidArgument("lower_bound_check: need at least 3 times");
  std::sort(ts.begin(), ts.end(), std::greater<>());

  const auto& grid = field.grid();
  std::vector<cplx> moment(grid.size());
  std::vector<double> xi(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.point(k, xi);
    moment[k] = xi[0] * field[k];
  }
  const SpectralField derivative(grid, std::move(moment));
  double fsum = 0.0;
  for (const auto& x : bases)
    fsum += std::norm(point_eval(derivative, x));

  LowerBoundResult res;
  res.floor = 0.5 * std::sqrt(fsum / static_cast<double>(bases.size()));
  const auto ec = error_curve(field, sym, curve, bases, ts);
  res.times = ec.times;
  for (std::size_t i = 0; i < ts.size(); ++i)
    res.ratios.push_back(ec.values[i] / std::pow(ts[i], alpha));
  res.liminf_ratio = *std::min_element(res.ratios.end() - 3, res.ratios.end());
  res.passed = res.floor > 0.0 && res.liminf_ratio >= 0.9 * res.floor;
  return res;
}

SpectralField make_graded_data(const FrequencyGrid& grid, double s, double delta, std::uint64_t seed, int k_min,
                               int k_max)
{
  if (k_min < 0 || k_max < k_min)
    throw InvalidArgument("make_graded_data: need 0 <= k_min <= k_max");
  std::vector<cplx> v(grid.size());
  for (int k = k_min; k <= k_max; ++k) {
    const auto piece = make_band_limited_random(grid, std::ldexp(1.0, k), seed * 64 + static_cast<std::uint64_t>(k));
    const double weight = std::exp2(-(s + delta) * k);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] += weight * piece[i];
  }
  return SpectralField(grid, std::move(v));
}

SmallTimeCheck small_time_check(const SpectralField& field, const Symbol& sym, const Curve& curve,
                                std::span<const std::vector<double>> bases, std::span<const double> times)
{
  const auto f0 = values_at_zero(field, bases);
  const double tolerance = 1e-12 * std::max(1.0, spectral_l1_norm(field));
  SmallTimeCheck check;
  for (double t : times) {
    const auto ev = evolve_along_curve(field, sym, curve, bases, t);
    for (std::size_t j = 0; j < bases.size(); ++j) {
      const double err = std::abs(ev.values[j] - f0[j]);
      const auto b = small_time_error_bounds(field, sym, curve, bases[j], t);
      const double bound = b.osc_bound + b.shift_bound;
      ++check.samples;
      if (err > bound + tolerance)
        ++check.violations;
      if (bound > 0.0)
        check.worst_ratio = std::max(check.worst_ratio, err / bound);
    }
  }
  return check;
}

} // namespace curveprop
