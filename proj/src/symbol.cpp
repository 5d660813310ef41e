#include "curveprop/symbol.hpp"

#include "curveprop/errors.hpp"
#include "curveprop/regression.hpp"
#include "curveprop/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace curveprop {

namespace {

double ipow(double x, int k)
{
  double r = 1.0;
  for (int i = 0; i < k; ++i)
    r *= x;
  return r;
}

void require_dimension(int n)
{
  if (n < 1)
    throw InvalidArgument("symbol dimension must be positive");
}

} // namespace

std::string to_string(SymbolKind kind)
{
  switch (kind) {
    case SymbolKind::elliptic: return "elliptic";
    case SymbolKind::nonelliptic: return "nonelliptic";
    case SymbolKind::fractional: return "fractional";
    case SymbolKind::polynomial2d: return "polynomial2d";
    case SymbolKind::polynomial: return "polynomial";
  }
  return "unknown";
}

SymbolKind symbol_kind_from_string(const std::string& name)
{
  for (auto k : {SymbolKind::elliptic, SymbolKind::nonelliptic, SymbolKind::fractional,
                 SymbolKind::polynomial2d, SymbolKind::polynomial})
    if (to_string(k) == name)
      return k;
  throw InvalidArgument("unknown symbol kind '" + name + "'");
}

Symbol Symbol::elliptic(int n)
{
  require_dimension(n);
  Symbol s;
  s.kind_ = SymbolKind::elliptic;
  s.n_ = n;
  return s;
}

Symbol Symbol::nonelliptic(std::vector<int> signs)
{
  if (signs.size() < 2)
    throw InvalidArgument("nonelliptic symbol needs n >= 2");
  if (signs.front() != 1)
    throw InvalidArgument("nonelliptic symbol: first sign must be +1");
  bool has_minus = false;
  for (int v : signs) {
    if (v != 1 && v != -1)
      throw InvalidArgument("nonelliptic symbol: signs must be +1 or -1");
    has_minus = has_minus || v == -1;
  }
  if (!has_minus)
    throw InvalidArgument("nonelliptic symbol: at least one sign must be -1");
  Symbol s;
  s.kind_ = SymbolKind::nonelliptic;
  s.n_ = static_cast<int>(signs.size());
  s.signs_ = std::move(signs);
  return s;
}

Symbol Symbol::nonelliptic(int n)
{
  if (n < 2)
    throw InvalidArgument("nonelliptic symbol needs n >= 2");
  std::vector<int> signs(static_cast<std::size_t>(n), -1);
  signs[0] = 1;
  return nonelliptic(std::move(signs));
}

Symbol Symbol::fractional(int n, double exponent)
{
  require_dimension(n);
  if (!(exponent > 1.0) || !std::isfinite(exponent))
    throw InvalidArgument("fractional symbol requires exponent a > 1");
  Symbol s;
  s.kind_ = SymbolKind::fractional;
  s.n_ = n;
  s.exponent_ = exponent;
  return s;
}

Symbol Symbol::polynomial2d(int m1, int m2, int sigma)
{
  if (m1 < 2 || m2 < m1)
    throw InvalidArgument("polynomial2d requires integers 2 <= m1 <= m2");
  if (sigma != 1 && sigma != -1)
    throw InvalidArgument("polynomial2d requires sigma in {+1, -1}");
  Symbol s;
  s.kind_ = SymbolKind::polynomial2d;
  s.n_ = 2;
  s.m1_ = m1;
  s.m2_ = m2;
  s.sigma_ = sigma;
  return s;
}

Symbol Symbol::polynomial(int n, ExponentTable terms)
{
  require_dimension(n);
  ExponentTable cleaned;
  for (auto& [exps, coeff] : terms) {
    if (exps.size() != static_cast<std::size_t>(n))
      throw InvalidArgument("polynomial term has wrong number of exponents");
    for (int e : exps)
      if (e < 0)
        throw InvalidArgument("polynomial exponents must be non-negative");
    if (!std::isfinite(coeff))
      throw InvalidArgument("polynomial coefficient must be finite");
    if (coeff != 0.0)
      cleaned[exps] += coeff;
  }
  Symbol s;
  s.kind_ = SymbolKind::polynomial;
  s.n_ = n;
  s.terms_ = std::move(cleaned);
  return s;
}

double Symbol::growth_order() const
{
  switch (kind_) {
    case SymbolKind::elliptic:
    case SymbolKind::nonelliptic: return 2.0;
    case SymbolKind::fractional: return exponent_;
    case SymbolKind::polynomial2d: return m2_;
    case SymbolKind::polynomial: {
      int degree = 0;
      for (const auto& [exps, coeff] : terms_) {
        int d = 0;
        for (int e : exps)
          d += e;
        degree = std::max(degree, d);
      }
      return degree;
    }
  }
  return 0.0;
}

double Symbol::operator()(std::span<const double> xi) const
{
  if (xi.size() != static_cast<std::size_t>(n_))
    throw InvalidArgument("eval_symbol: point has dimension " + std::to_string(xi.size()) +
                          ", symbol has " + std::to_string(n_));
  return evaluate(xi);
}

double Symbol::evaluate(std::span<const double> xi) const
{
  switch (kind_) {
    case SymbolKind::elliptic: {
      double r2 = 0.0;
      for (double v : xi)
        r2 += v * v;
      return r2;
    }
    case SymbolKind::nonelliptic: {
      double p = 0.0;
      for (std::size_t j = 0; j < xi.size(); ++j)
        p += signs_[j] * xi[j] * xi[j];
      return p;
    }
    case SymbolKind::fractional: {
      double r2 = 0.0;
      for (double v : xi)
        r2 += v * v;
      return std::pow(r2, 0.5 * exponent_);
    }
    case SymbolKind::polynomial2d:
      return ipow(xi[0], m1_) + sigma_ * ipow(xi[1], m2_);
    case SymbolKind::polynomial: {
      double p = 0.0;
      for (const auto& [exps, coeff] : terms_) {
        double term = coeff;
        for (std::size_t j = 0; j < exps.size(); ++j)
          term *= ipow(xi[j], exps[j]);
        p += term;
      }
      return p;
    }
  }
  return 0.0;
}

double eval_symbol(const Symbol& sym, std::span<const double> xi) { return sym(xi); }

double growth_order(const Symbol& sym) { return sym.growth_order(); }

std::vector<std::vector<double>> sphere_samples(int n, double radius, int count)
{
  std::vector<std::vector<double>> pts;
  if (n == 1) {
    pts.push_back({radius});
    pts.push_back({-radius});
    return pts;
  }
  if (n == 2) {
    pts.reserve(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
      const double a = 2.0 * std::numbers::pi * j / count;
      pts.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    // exact axis points avoid cos(pi/2) round-off
    if (count % 4 == 0) {
      const int q = count / 4;
      pts[0] = {radius, 0.0};
      pts[static_cast<std::size_t>(q)] = {0.0, radius};
      pts[static_cast<std::size_t>(2 * q)] = {-radius, 0.0};
      pts[static_cast<std::size_t>(3 * q)] = {0.0, -radius};
    }
    return pts;
  }
  for (int d = 0; d < n; ++d)
    for (double sgn : {1.0, -1.0}) {
      std::vector<double> p(static_cast<std::size_t>(n), 0.0);
      p[static_cast<std::size_t>(d)] = sgn * radius;
      pts.push_back(std::move(p));
    }
  const CounterRng rng(0x5eed5eed, static_cast<std::uint64_t>(n));
  std::uint64_t draw = 0;
  while (static_cast<int>(pts.size()) < count) {
    std::vector<double> p(static_cast<std::size_t>(n));
    double norm = 0.0;
    for (auto& v : p) {
      v = rng.normal(draw++);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0)
      continue;
    for (auto& v : p)
      v *= radius / norm;
    pts.push_back(std::move(p));
  }
  return pts;
}

double sphere_max(const Symbol& sym, double radius, int samples)
{
  double best = 0.0;
  for (const auto& p : sphere_samples(sym.dimension(), radius, samples))
    best = std::max(best, std::abs(sym(p)));
  return best;
}

double fit_growth(const Symbol& sym, std::span<const double> radii, int samples_per_sphere)
{
  if (radii.size() < 4)
    throw InvalidArgument("fit_growth: need at least 4 radii");
  if (samples_per_sphere < 16)
    throw InvalidArgument("fit_growth: need at least 16 samples per sphere");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 1.0))
      throw InvalidArgument("fit_growth: radii must be >= 1");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw InvalidArgument("fit_growth: radii must be increasing");
  }

  std::vector<double> maxima;
  maxima.reserve(radii.size());
  bool all_zero = true;
  for (double r : radii) {
    maxima.push_back(sphere_max(sym, r, samples_per_sphere));
    all_zero = all_zero && maxima.back() == 0.0;
  }
  if (all_zero)
    throw DegenerateData("fit_growth: symbol vanishes on every sampled sphere");
  for (std::size_t i = 0; i < maxima.size(); ++i)
    if (maxima[i] == 0.0)
      throw DegenerateData("fit_growth: sphere maximum is zero at R = " + std::to_string(radii[i]));
  return fit_loglog(radii, maxima).slope;
}

} // namespace curveprop
