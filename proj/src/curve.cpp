#include "curveprop/curve.hpp"

#include "curveprop/errors.hpp"
#include "curveprop/regression.hpp"
#include "curveprop/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace curveprop {

namespace {

double distance(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

} // namespace

std::string to_string(CurveKind kind)
{
  switch (kind) {
    case CurveKind::vertical: return "vertical";
    case CurveKind::shift: return "shift";
    case CurveKind::linear_drift: return "linear_drift";
    case CurveKind::tabulated: return "tabulated";
  }
  return "unknown";
}

CurveKind curve_kind_from_string(const std::string& name)
{
  for (auto k : {CurveKind::vertical, CurveKind::shift, CurveKind::linear_drift, CurveKind::tabulated})
    if (to_string(k) == name)
      return k;
  throw InvalidArgument("unknown curve kind '" + name + "'");
}

double Ball::volume() const
{
  const double n = static_cast<double>(center.size());
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) * std::pow(radius, n);
}

Curve Curve::vertical(int n)
{
  if (n < 1)
    throw InvalidArgument("curve dimension must be positive");
  Curve c;
  c.kind_ = CurveKind::vertical;
  c.n_ = n;
  return c;
}

Curve Curve::shift(std::vector<double> direction, double alpha)
{
  if (direction.empty())
    throw InvalidArgument("shift curve needs a direction");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidArgument("shift curve exponent must lie in (0, 1]");
  Curve c;
  c.kind_ = CurveKind::shift;
  c.n_ = static_cast<int>(direction.size());
  c.alpha_ = alpha;
  c.direction_ = std::move(direction);
  return c;
}

Curve Curve::linear_drift(std::vector<double> velocity)
{
  if (velocity.empty())
    throw InvalidArgument("linear-drift curve needs a velocity");
  Curve c;
  c.kind_ = CurveKind::linear_drift;
  c.n_ = static_cast<int>(velocity.size());
  c.direction_ = std::move(velocity);
  return c;
}

Curve Curve::tabulated(int n, std::vector<AffineKnot> knots, double alpha)
{
  if (n < 1)
    throw InvalidArgument("curve dimension must be positive");
  if (knots.size() < 2)
    throw InvalidArgument("tabulated curve needs at least two knots");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidArgument("tabulated curve exponent must lie in (0, 1]");
  const auto nn = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto& k = knots[i];
    if (k.matrix.size() != nn * nn || k.offset.size() != nn)
      throw InvalidArgument("tabulated curve knot has wrong matrix/offset size");
    if (i > 0 && !(k.time > knots[i - 1].time))
      throw InvalidArgument("tabulated curve knot times must increase");
  }
  if (knots.front().time != 0.0 || knots.back().time != 1.0)
    throw InvalidArgument("tabulated curve knots must span [0, 1]");
  const auto& first = knots.front();
  for (std::size_t r = 0; r < nn; ++r) {
    if (first.offset[r] != 0.0)
      throw InvalidArgument("tabulated curve must satisfy gamma(x, 0) = x (offset)");
    for (std::size_t c = 0; c < nn; ++c)
      if (first.matrix[r * nn + c] != (r == c ? 1.0 : 0.0))
        throw InvalidArgument("tabulated curve must satisfy gamma(x, 0) = x (matrix)");
  }
  Curve c;
  c.kind_ = CurveKind::tabulated;
  c.n_ = n;
  c.alpha_ = alpha;
  c.knots_ = std::move(knots);
  return c;
}

std::vector<double> Curve::operator()(std::span<const double> x, double t) const
{
  std::vector<double> out(static_cast<std::size_t>(n_));
  eval_into(x, t, out);
  return out;
}

void Curve::eval_into(std::span<const double> x, double t, std::span<double> out) const
{
  const auto nn = static_cast<std::size_t>(n_);
  if (x.size() != nn || out.size() != nn)
    throw InvalidArgument("eval_curve: dimension mismatch");
  if (kind_ == CurveKind::vertical) {
    if (!std::isfinite(t))
      throw InvalidArgument("eval_curve: time must be finite");
    std::copy(x.begin(), x.end(), out.begin());
    return;
  }
  if (!(t >= 0.0 && t <= 1.0))
    throw InvalidArgument("eval_curve: time " + std::to_string(t) + " outside [0, 1]");

  switch (kind_) {
    case CurveKind::shift: {
      const double s = t == 0.0 ? 0.0 : std::pow(t, alpha_);
      for (std::size_t i = 0; i < nn; ++i)
        out[i] = x[i] - direction_[i] * s;
      return;
    }
    case CurveKind::linear_drift:
      for (std::size_t i = 0; i < nn; ++i)
        out[i] = x[i] + t * direction_[i];
      return;
    case CurveKind::tabulated: {
      auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                                 [](double v, const AffineKnot& k) { return v < k.time; });
      if (hi == knots_.end())
        hi = std::prev(knots_.end());
      const auto lo = std::prev(hi == knots_.begin() ? std::next(hi) : hi);
      const auto& a = *lo;
      const auto& b = *std::next(lo);
      const double w = (t - a.time) / (b.time - a.time);
      for (std::size_t r = 0; r < nn; ++r) {
        double v = (1.0 - w) * a.offset[r] + w * b.offset[r];
        for (std::size_t c = 0; c < nn; ++c)
          v += ((1.0 - w) * a.matrix[r * nn + c] + w * b.matrix[r * nn + c]) * x[c];
        out[r] = v;
      }
      return;
    }
    case CurveKind::vertical: break;
  }
}

std::vector<double> eval_curve(const Curve& c, std::span<const double> x, double t) { return c(x, t); }

std::vector<std::vector<double>> sample_ball(const Ball& ball, int count, std::uint64_t seed)
{
  const auto n = static_cast<std::size_t>(ball.dimension());
  if (n == 0)
    throw InvalidArgument("sample_ball: empty center");
  std::vector<std::vector<double>> pts;
  if (count <= 0)
    return pts;
  pts.reserve(static_cast<std::size_t>(count));
  pts.push_back(ball.center);
  const CounterRng rng(seed, 0xba11);
  std::uint64_t draw = 0;
  std::vector<double> u(n);
  while (static_cast<int>(pts.size()) < count) {
    double r2 = 0.0;
    for (auto& v : u) {
      v = 2.0 * rng.uniform(draw++) - 1.0;
      r2 += v * v;
    }
    if (r2 > 1.0)
      continue;
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i)
      p[i] = ball.center[i] + ball.radius * u[i];
    pts.push_back(std::move(p));
  }
  return pts;
}

HolderEstimate estimate_holder(const Curve& c, const Ball& ball, int x_samples, int t_samples)
{
  if (x_samples < 8 || t_samples < 8)
    throw InvalidArgument("estimate_holder: need at least 8 samples in x and t");
  if (ball.dimension() != c.dimension())
    throw InvalidArgument("estimate_holder: ball and curve dimensions differ");

  const auto xs = sample_ball(ball, x_samples);
  const auto n = static_cast<std::size_t>(c.dimension());
  std::vector<double> a(n), b(n);
  std::vector<double> gaps, sups;
  for (int k = 1; k <= t_samples; ++k) {
    const double g = std::ldexp(1.0, -k);
    double sup = 0.0;
    for (int j = 0; j < t_samples; ++j) {
      const double t0 = (1.0 - g) * j / (t_samples - 1);
      for (const auto& x : xs) {
        c.eval_into(x, t0, a);
        c.eval_into(x, std::min(1.0, t0 + g), b);
        sup = std::max(sup, distance(a, b));
      }
    }
    gaps.push_back(g);
    sups.push_back(sup);
  }

  std::vector<double> fg, fs;
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (sups[i] > 0.0) {
      fg.push_back(gaps[i]);
      fs.push_back(sups[i]);
    }
  HolderEstimate est;
  if (fg.size() < 2) {
    est.alpha = 1.0;
    est.no_variation = true;
    est.constant = 0.0;
    return est;
  }
  est.alpha = fit_loglog(fg, fs).slope;
  for (std::size_t i = 0; i < fg.size(); ++i)
    est.constant = std::max(est.constant, fs[i] / std::pow(fg[i], est.alpha));
  return est;
}

BilipschitzBounds estimate_bilipschitz(const Curve& c, const Ball& ball, double t, int x_pairs,
                                       std::uint64_t seed)
{
  if (x_pairs < 32)
    throw InvalidArgument("estimate_bilipschitz: need at least 32 pairs");
  if (ball.dimension() != c.dimension())
    throw InvalidArgument("estimate_bilipschitz: ball and curve dimensions differ");

  const auto n = static_cast<std::size_t>(c.dimension());
  const Ball inner{ball.center, ball.radius / 2.0};
  const auto bases = sample_ball(inner, x_pairs, seed);
  const CounterRng rng(seed, 0xb111);
  std::uint64_t draw = 0;

  BilipschitzBounds bounds{std::numeric_limits<double>::infinity(), 0.0};
  bool any = false;
  std::vector<double> y(n), gx(n), gy(n), dir(n);
  for (int p = 0; p < x_pairs; ++p) {
    const auto& x = bases[static_cast<std::size_t>(p)];
    std::fill(dir.begin(), dir.end(), 0.0);
    if (p < static_cast<int>(2 * n)) {
      dir[static_cast<std::size_t>(p) / 2] = (p % 2 == 0) ? 1.0 : -1.0;
    } else {
      double norm = 0.0;
      for (auto& v : dir) {
        v = rng.normal(draw++);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      if (norm == 0.0)
        continue;
      for (auto& v : dir)
        v /= norm;
    }
    const double r = inner.radius * (0.05 + 0.95 * rng.uniform(draw++));
    for (std::size_t i = 0; i < n; ++i)
      y[i] = x[i] + r * dir[i];
    const double dxy = distance(x, y);
    if (dxy == 0.0)
      continue;
    c.eval_into(x, t, gx);
    c.eval_into(y, t, gy);
    const double ratio = distance(gx, gy) / dxy;
    bounds.lower = std::min(bounds.lower, ratio);
    bounds.upper = std::max(bounds.upper, ratio);
    any = true;
  }
  if (!any)
    throw DegenerateData("estimate_bilipschitz: all sampled pairs coincide");
  return bounds;
}

} // namespace curveprop
