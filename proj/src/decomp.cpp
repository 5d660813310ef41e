#include "curveprop/decomp.hpp"

#include "curveprop/errors.hpp"
#include "curveprop/parallel.hpp"
#include "curveprop/regression.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace curveprop {

namespace {

/// C-infinity bump on (-1, 1) with peak value 1 at 0.
double unit_bump(double u)
{
  if (!(std::abs(u) < 1.0))
    return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

/// Smooth step: 0 for u <= 0, 1 for u >= 1.
double smooth_step(double u)
{
  if (u <= 0.0)
    return 0.0;
  if (u >= 1.0)
    return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

void require_exponents(int m1, int m2)
{
  if (m1 < 2 || m2 < m1)
    throw InvalidArgument("anisotropic structures require integers 2 <= m1 <= m2");
}

/// C^2 cutoff: 1 for |u| <= 1/2, 0 for |u| >= 1, quintic blend between.
long double cutoff(long double u)
{
  const long double a = std::fabs(u);
  if (a <= 0.5L)
    return 1.0L;
  if (a >= 1.0L)
    return 0.0L;
  const long double v = 2.0L * (a - 0.5L);
  return 1.0L - v * v * v * (10.0L - 15.0L * v + 6.0L * v * v);
}

} // namespace

FilterBank::FilterBank(int levels) : levels_(levels)
{
  if (levels < 1)
    throw InvalidArgument("filter bank needs at least one level");
}

FilterBank FilterBank::covering(const FrequencyGrid& grid)
{
  const double rmax = grid.xi_max() * std::sqrt(static_cast<double>(grid.dimension()));
  return FilterBank(static_cast<int>(std::ceil(std::log2(rmax))) + 1);
}

double FilterBank::raw(int k, double r) const
{
  if (k == 0)
    return smooth_step(2.0 - r);
  if (r <= 0.0)
    return 0.0;
  return unit_bump(std::log2(r) - k);
}

std::vector<double> FilterBank::values(double r) const
{
  std::vector<double> v(static_cast<std::size_t>(levels_));
  double sum = 0.0;
  for (int k = 0; k < levels_; ++k) {
    v[static_cast<std::size_t>(k)] = raw(k, r);
    sum += v[static_cast<std::size_t>(k)];
  }
  if (sum > 0.0)
    for (auto& x : v)
      x /= sum;
  return v;
}

double FilterBank::operator()(int k, double r) const
{
  if (k < 0 || k >= levels_)
    return 0.0;
  return values(r)[static_cast<std::size_t>(k)];
}

std::vector<DyadicPiece> dyadic_decompose(const SpectralField& field)
{
  return dyadic_decompose(field, FilterBank::covering(field.grid()));
}

std::vector<DyadicPiece> dyadic_decompose(const SpectralField& field, const FilterBank& bank)
{
  const auto& grid = field.grid();
  const auto L = static_cast<std::size_t>(bank.levels());
  std::vector<std::vector<cplx>> parts(L, std::vector<cplx>(grid.size()));
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (field[idx] == cplx{})
      continue;
    const auto w = bank.values(grid.radius(idx));
    for (std::size_t k = 0; k < L; ++k)
      parts[k][idx] = w[k] * field[idx];
  }
  std::vector<DyadicPiece> pieces;
  pieces.reserve(L);
  for (std::size_t k = 0; k < L; ++k) {
    std::optional<double> band;
    if (k > 0)
      band = std::ldexp(1.0, static_cast<int>(k));
    pieces.push_back({static_cast<int>(k), SpectralField(grid, std::move(parts[k]), band)});
  }
  return pieces;
}

double anisotropic_rho(int k, int m1, int m2, std::span<const double> xi)
{
  if (xi.size() != 2)
    throw UnsupportedDimension("anisotropic tiles are defined for n = 2");
  const double A = std::exp2(static_cast<double>(m2) * k / m1);
  const double B = std::ldexp(1.0, k);
  return std::abs(xi[0]) / A + std::abs(xi[1]) / B;
}

AnisotropicTiling anisotropic_tiling(double lambda, int m1, int m2)
{
  require_exponents(m1, m2);
  if (!(lambda >= 1.0))
    throw InvalidArgument("anisotropic tiling needs lambda >= 1");
  AnisotropicTiling tiling;
  tiling.m1 = m1;
  tiling.m2 = m2;
  tiling.lambda = lambda;
  const double ratio = static_cast<double>(m2) / m1;
  tiling.window = ratio < 2.0 ? 1.0 : ratio / 2.0 + 0.25;

  const int kmax = static_cast<int>(std::ceil(std::log2(4.0 * lambda) + tiling.window)) + 2;
  // gap > 0 measures how far (in log scale) the diamond rho_k = 1 misses
  // the circle |xi| = lambda
  double best_gap = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0; k <= kmax; ++k) {
    const double A = std::exp2(ratio * k);
    const double B = std::ldexp(1.0, k);
    const double a = lambda / A;
    const double b = lambda / B;
    const double gap = std::max({0.0, std::log(std::min(a, b)), -std::log(std::hypot(a, b))});
    if (gap == 0.0)
      tiling.active.push_back(k);
    if (gap < best_gap) {
      best_gap = gap;
      best_k = k;
    }

    const double lo = lambda / 2.0 * std::min(1.0 / A, 1.0 / B);
    const double hi = 2.0 * lambda * std::hypot(1.0 / A, 1.0 / B);
    if (lo < std::exp2(tiling.window) && hi > std::exp2(-tiling.window))
      tiling.tiles.push_back(k);
  }
  if (tiling.active.empty())
    tiling.active.push_back(best_k);
  return tiling;
}

AnisotropicDecomposition anisotropic_decompose(const SpectralField& field, int m1, int m2)
{
  if (field.dimension() != 2)
    throw UnsupportedDimension("anisotropic decomposition is defined for n = 2 only");
  if (!field.band())
    throw InvalidArgument("anisotropic decomposition needs a band-limited field");
  const double lambda = *field.band();
  AnisotropicDecomposition out;
  out.tiling = anisotropic_tiling(lambda, m1, m2);
  const auto& tiles = out.tiling.tiles;
  const double w = out.tiling.window;

  const auto& grid = field.grid();
  std::vector<std::vector<cplx>> parts(tiles.size(), std::vector<cplx>(grid.size()));
  std::vector<double> xi(2), weight(tiles.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const double r = grid.radius(idx);
    const bool in_annulus = r >= lambda / 2.0 && r <= 2.0 * lambda;
    if (!in_annulus && field[idx] == cplx{})
      continue;
    grid.point(idx, xi);
    double sum = 0.0;
    for (std::size_t j = 0; j < tiles.size(); ++j) {
      const double rho = anisotropic_rho(tiles[j], m1, m2, xi);
      weight[j] = rho > 0.0 ? unit_bump(std::log2(rho) / w) : 0.0;
      sum += weight[j];
    }
    if (sum == 0.0) {
      if (in_annulus)
        throw DegenerateData("anisotropic windows leave a point of the annulus uncovered");
      continue;
    }
    for (std::size_t j = 0; j < tiles.size(); ++j)
      parts[j][idx] = weight[j] / sum * field[idx];
  }

  for (std::size_t j = 0; j < tiles.size(); ++j) {
    const bool active = std::find(out.tiling.active.begin(), out.tiling.active.end(), tiles[j]) != out.tiling.active.end();
    out.pieces.push_back({tiles[j], active, SpectralField(grid, std::move(parts[j]), lambda)});
  }
  return out;
}

int TimeTiling::coverage(double t) const
{
  int c = 0;
  for (const auto& iv : intervals)
    c += iv.contains(t) ? 1 : 0;
  return c;
}

TimeTiling time_intervals(double lambda, int m1)
{
  if (m1 < 2)
    throw InvalidArgument("time tiling requires m1 >= 2");
  if (!(lambda >= 1.0) || !std::isfinite(lambda))
    throw InvalidArgument("time tiling requires lambda >= 1");
  TimeTiling tiling;
  tiling.lambda = lambda;
  tiling.m1 = m1;
  tiling.length = std::pow(lambda, 1.0 - m1);
  const double inv = 1.0 / tiling.length;
  const double nearest = std::round(inv);
  const auto count = static_cast<long long>(std::abs(inv - nearest) <= 1e-9 * inv ? nearest : std::ceil(inv));
  if (count > 100'000'000)
    throw InvalidArgument("time tiling would need more than 1e8 intervals");
  tiling.intervals.reserve(static_cast<std::size_t>(count));
  for (long long j = 0; j < count; ++j) {
    TimeInterval iv;
    iv.start = static_cast<double>(j) * tiling.length;
    iv.end = std::min(static_cast<double>(j + 1) * tiling.length, 1.0);
    if (j + 1 == count) {
      iv.end = 1.0;
      iv.closed = true;
    }
    tiling.intervals.push_back(iv);
  }
  return tiling;
}

double kernel_bump(double eta1, double eta2)
{
  const long double a = cutoff(eta1 / 2.0L) * cutoff(eta2 / 2.0L);
  const long double b = cutoff(2.0L * eta1) * cutoff(2.0L * eta2);
  return static_cast<double>(a - b);
}

double kernel_window(const KernelParams& p, double xi1, double xi2)
{
  const double A = std::exp2(static_cast<double>(p.m2) * p.k / p.m1);
  const double B = std::ldexp(1.0, p.k);
  return kernel_bump(xi1 / A, xi2 / B) * kernel_bump(xi1 / p.lambda, xi2 / p.lambda);
}

namespace {

constexpr std::size_t window_terms = 4;
constexpr std::size_t pair_terms = window_terms * window_terms;

struct AxisIntegrals
{
  std::array<std::complex<long double>, pair_terms> value{};
  std::array<long double, pair_terms> abs_mass{};
};

/// For one axis, integrals of e^{i (d xi + s c xi^m)} u_a(xi) u_b(xi) where
/// u_{(i,j)}(xi) = cutoff(xi / tile[i]) cutoff(xi / band[j]).
AxisIntegrals axis_integrals(double d, double s, int m, int coef, std::array<double, 2> tile,
                             std::array<double, 2> band)
{
  const long double R = std::min(tile[0], band[0]);
  const long double qmin = std::min(tile[1], band[1]);
  long double h = std::min(R / 256.0L, qmin / 64.0L);
  const long double omega = std::fabs(d) + std::fabs(s) * m * std::pow(R, static_cast<long double>(m - 1));
  constexpr long double max_step_phase = std::numbers::pi_v<long double> / 4.0L;
  while (omega * h > max_step_phase)
    h /= 2.0L;
  const auto half = static_cast<long long>(std::ceil(R / h));
  h = R / static_cast<long double>(half);
  const long long nodes = 2 * half + 1;
  if (nodes > (1LL << 26))
    throw InvalidArgument("kernel quadrature needs more than 2^26 nodes per axis");

  constexpr long long chunk = 1 << 15;
  const auto chunks = static_cast<std::size_t>((nodes + chunk - 1) / chunk);
  std::vector<AxisIntegrals> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    auto& acc = partial[c];
    const long long begin = static_cast<long long>(c) * chunk;
    const long long end = std::min(nodes, begin + chunk);
    for (long long i = begin; i < end; ++i) {
      const long double xi = -R + h * static_cast<long double>(i);
      std::array<long double, window_terms> u{};
      bool any = false;
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
          const long double v = cutoff(xi / tile[a]) * cutoff(xi / band[b]);
          u[a * 2 + b] = v;
          any = any || v != 0.0L;
        }
      if (!any)
        continue;
      long double xm = 1.0L;
      for (int e = 0; e < m; ++e)
        xm *= xi;
      const long double phase = d * xi + s * coef * xm;
      const std::complex<long double> e{std::cos(phase), std::sin(phase)};
      for (std::size_t p = 0; p < window_terms; ++p)
        for (std::size_t q = 0; q < window_terms; ++q) {
          const long double w = u[p] * u[q];
          acc.value[p * window_terms + q] += w * e;
          acc.abs_mass[p * window_terms + q] += std::fabs(w);
        }
    }
  });

  AxisIntegrals total;
  for (const auto& part : partial)
    for (std::size_t t = 0; t < pair_terms; ++t) {
      total.value[t] += part.value[t];
      total.abs_mass[t] += part.abs_mass[t];
    }
  for (std::size_t t = 0; t < pair_terms; ++t) {
    total.value[t] *= h;
    total.abs_mass[t] *= h;
  }
  return total;
}

} // namespace

KernelValue kernel_eval(const KernelParams& p, const Curve& curve, std::span<const double> x,
                        std::span<const double> y, double t, double tp)
{
  require_exponents(p.m1, p.m2);
  if (p.sigma != 1 && p.sigma != -1)
    throw InvalidArgument("kernel sigma must be +1 or -1");
  if (!(p.lambda > 0.0) || p.k < 0)
    throw InvalidArgument("kernel needs lambda > 0 and k >= 0");
  if (curve.dimension() != 2 || x.size() != 2 || y.size() != 2)
    throw UnsupportedDimension("kernel is defined for n = 2");

  const auto gx = curve(x, t);
  const auto gy = curve(y, tp);
  const double s = t - tp;
  const double A = std::exp2(static_cast<double>(p.m2) * p.k / p.m1);
  const double B = std::ldexp(1.0, p.k);
  const double L = p.lambda;

  // psi(xi/(A,B)) lives in the box (2A,2B) outside the box (A/4,B/4);
  // the supports are disjoint when one outer box sits in the other's hole
  if ((2.0 * A <= L / 4.0 && 2.0 * B <= L / 4.0) || (2.0 * L <= A / 4.0 && 2.0 * L <= B / 4.0))
    return {cplx{}, true, 0.0};

  // Psi = sum over (i, j) of c_i c_j u1_{ij}(xi_1) u2_{ij}(xi_2) with
  // c = (+1, -1) selecting Phi(eta/2) and Phi(2 eta)
  const auto I1 = axis_integrals(gx[0] - gy[0], s, p.m1, 1, {2.0 * A, A / 2.0}, {2.0 * L, L / 2.0});
  const auto I2 = axis_integrals(gx[1] - gy[1], s, p.m2, p.sigma, {2.0 * B, B / 2.0}, {2.0 * L, L / 2.0});

  constexpr std::array<int, window_terms> sign{1, -1, -1, 1}; // c_i c_j for index i*2+j
  std::complex<long double> K = 0.0L;
  long double scale = 0.0L;
  for (std::size_t a = 0; a < window_terms; ++a)
    for (std::size_t b = 0; b < window_terms; ++b) {
      const std::size_t t2 = a * window_terms + b;
      const long double c = static_cast<long double>(sign[a] * sign[b]);
      K += c * I1.value[t2] * I2.value[t2];
      scale += std::abs(I1.value[t2]) * I2.abs_mass[t2] + I1.abs_mass[t2] * std::abs(I2.value[t2]);
    }
  KernelValue out;
  out.value = {static_cast<double>(K.real()), static_cast<double>(K.imag())};
  out.noise_floor = static_cast<double>(64.0L * std::numeric_limits<long double>::epsilon() * scale);
  return out;
}

KernelDecayFit kernel_decay_fit(const KernelParams& p, const Curve& curve, std::span<const double> x,
                                std::span<const double> y, std::span<const double> separations)
{
  if (separations.size() < 2)
    throw InvalidArgument("kernel_decay_fit needs at least two separations");
  const double near_zone = 100.0 * std::pow(p.lambda, 1.0 - p.m1);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double sep : separations) {
    if (!(sep >= near_zone * (1.0 - 1e-12)))
      throw PreconditionViolation("separation " + std::to_string(sep) + " is inside the near zone 100 lambda^{1-m1} = " +
                                  std::to_string(near_zone));
    lo = std::min(lo, sep);
    hi = std::max(hi, sep);
  }
  if (hi < 8.0 * lo * (1.0 - 1e-12))
    throw PreconditionViolation("separations must span at least three octaves");

  KernelDecayFit fit;
  std::vector<double> xs, ys;
  for (double sep : separations) {
    const auto kv = kernel_eval(p, curve, x, y, sep, 0.0);
    const double mag = std::abs(kv.value);
    fit.samples.push_back({sep, mag, kv.noise_floor});
    if (mag > kv.noise_floor && mag > 1e-300) {
      xs.push_back(sep);
      ys.push_back(mag);
    }
  }
  if (xs.size() < 2) {
    fit.underflow = true;
    fit.slope = 0.0;
    return fit;
  }
  const auto line = fit_loglog(xs, ys);
  fit.slope = line.slope;
  fit.residual = line.residual;
  return fit;
}

} // namespace curveprop
