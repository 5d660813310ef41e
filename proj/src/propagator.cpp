#include "curveprop/propagator.hpp"

#include "curveprop/errors.hpp"
#include "curveprop/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace curveprop {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Planner calls are not thread safe; execution on plan-local buffers is.
std::mutex& fftw_planner_mutex()
{
  static std::mutex m;
  return m;
}

class FftBuffer
{
public:
  explicit FftBuffer(std::size_t size)
    : data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size))), size_(size)
  {
    if (!data_)
      throw std::bad_alloc();
    std::fill_n(reinterpret_cast<double*>(data_), 2 * size, 0.0);
  }
  ~FftBuffer() { fftw_free(data_); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  fftw_complex* data() { return data_; }
  cplx get(std::size_t i) const { return {data_[i][0], data_[i][1]}; }
  void set(std::size_t i, cplx v)
  {
    data_[i][0] = v.real();
    data_[i][1] = v.imag();
  }
  std::size_t size() const { return size_; }

private:
  fftw_complex* data_;
  std::size_t size_;
};

/// In-place n-dimensional DFT of an M^rank array.
void fft_inplace(FftBuffer& buf, int rank, int size, int sign)
{
  std::vector<int> dims(static_cast<std::size_t>(rank), size);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft(rank, dims.data(), buf.data(), buf.data(), sign, FFTW_ESTIMATE);
  }
  if (!plan)
    throw InvalidArgument("FFT planning failed");
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

void require_time(double t, const char* what)
{
  if (!(t >= 0.0 && t <= 1.0))
    throw InvalidArgument(std::string(what) + ": time " + std::to_string(t) + " outside [0, 1]");
}

void require_dimension(const SpectralField& field, const Symbol& sym)
{
  if (field.dimension() != sym.dimension())
    throw InvalidArgument("symbol dimension " + std::to_string(sym.dimension()) + " does not match field dimension " +
                          std::to_string(field.dimension()));
}

std::vector<cplx> evolved_values(const SpectralField& field, const Symbol& sym, double t)
{
  std::vector<cplx> g(field.values().begin(), field.values().end());
  if (t == 0.0)
    return g;
  const auto m = multiplier(field.grid(), sym, t);
  for (std::size_t k = 0; k < g.size(); ++k)
    g[k] *= m[k];
  return g;
}

cplx sum_at(const FrequencyGrid& grid, std::span<const cplx> values, std::span<const double> x)
{
  const auto tables = exponential_tables(grid, x);
  return tensor_sum(grid, values, tables);
}

double distance(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// Barycentric weights for 16 equispaced nodes: (-1)^k C(15, k).
constexpr int interp_points = 16;

std::array<double, interp_points> interp_weights()
{
  std::array<double, interp_points> w{};
  double c = 1.0;
  for (int k = 0; k < interp_points; ++k) {
    w[static_cast<std::size_t>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * c;
    c = c * (interp_points - 1 - k) / (k + 1);
  }
  return w;
}

/// Interpolation coefficients at fractional position s relative to node 0
/// of a 16-node stencil; returns exact-hit selection when s is a node.
std::array<double, interp_points> lagrange_coefficients(double s)
{
  static const auto w = interp_weights();
  std::array<double, interp_points> c{};
  for (int k = 0; k < interp_points; ++k)
    if (s == k) {
      c[static_cast<std::size_t>(k)] = 1.0;
      return c;
    }
  double denom = 0.0;
  for (int k = 0; k < interp_points; ++k) {
    const double v = w[static_cast<std::size_t>(k)] / (s - k);
    c[static_cast<std::size_t>(k)] = v;
    denom += v;
  }
  for (auto& v : c)
    v /= denom;
  return c;
}

int next_pow2(int v)
{
  int p = 1;
  while (p < v)
    p *= 2;
  return p;
}

} // namespace

std::vector<cplx> multiplier(const FrequencyGrid& grid, const Symbol& sym, double t)
{
  if (grid.dimension() != sym.dimension())
    throw InvalidArgument("symbol and grid dimensions differ");
  std::vector<cplx> m(grid.size());
  std::vector<double> xi(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t k = 0; k < m.size(); ++k) {
    grid.point(k, xi);
    m[k] = std::polar(1.0, t * sym(xi));
  }
  return m;
}

SpectralField evolve_field(const SpectralField& field, const Symbol& sym, double t)
{
  require_dimension(field, sym);
  return SpectralField(field.grid(), evolved_values(field, sym, t), field.band());
}

cplx evolve_at(const SpectralField& field, const Symbol& sym, std::span<const double> x, double t)
{
  require_dimension(field, sym);
  require_time(t, "evolve_at");
  if (t == 0.0)
    return point_eval(field, x);
  const auto g = evolved_values(field, sym, t);
  return sum_at(field.grid(), g, x);
}

std::vector<cplx> evolve_points(const SpectralField& field, const Symbol& sym,
                                std::span<const std::vector<double>> points, double t)
{
  require_dimension(field, sym);
  require_time(t, "evolve_points");
  const auto g = evolved_values(field, sym, t);
  std::vector<cplx> out(points.size());
  parallel_for(points.size(), [&](std::size_t j) { out[j] = sum_at(field.grid(), g, points[j]); });
  return out;
}

std::size_t SpatialGrid::size() const
{
  std::size_t s = 1;
  for (std::size_t a = 0; a < origin.size(); ++a)
    s *= static_cast<std::size_t>(count);
  return s;
}

std::vector<double> SpatialGrid::point(std::size_t flat) const
{
  std::vector<double> p(origin.size());
  for (std::size_t a = origin.size(); a-- > 0;) {
    p[a] = origin[a] + spacing * static_cast<double>(flat % static_cast<std::size_t>(count));
    flat /= static_cast<std::size_t>(count);
  }
  return p;
}

SpatialGrid dual_spatial_grid(const FrequencyGrid& grid, int transform_size, std::vector<double> origin, int count)
{
  if (transform_size < grid.points())
    throw InvalidArgument("transform size must be at least the number of frequency points");
  if (count < 1 || count > transform_size)
    throw InvalidArgument("spatial count must lie in [1, transform size]");
  if (origin.size() != static_cast<std::size_t>(grid.dimension()))
    throw InvalidArgument("spatial origin has the wrong dimension");
  return SpatialGrid{std::move(origin), two_pi / (transform_size * grid.spacing()), count};
}

std::vector<cplx> evolve_uniform_fast(const SpectralField& field, const Symbol& sym, const SpatialGrid& xs, double t)
{
  require_dimension(field, sym);
  require_time(t, "evolve_uniform_fast");
  const auto& grid = field.grid();
  const int n = grid.dimension();
  if (xs.dimension() != n)
    throw InvalidArgument("spatial grid dimension does not match the field");
  if (!(xs.spacing > 0.0) || xs.count < 1)
    throw InvalidArgument("spatial grid needs positive spacing and count");

  const auto g = evolved_values(field, sym, t);
  if (n >= 3) {
    std::vector<cplx> out(xs.size());
    parallel_for(out.size(), [&](std::size_t j) { out[j] = sum_at(grid, g, xs.point(j)); });
    return out;
  }

  const double h = grid.spacing();
  const double ratio = two_pi / (xs.spacing * h);
  const long long M = std::llround(ratio);
  if (M < grid.points() || std::abs(ratio - static_cast<double>(M)) > 1e-9 * ratio)
    throw InvalidArgument("spatial grid is not dual to the frequency grid (spacing * h must be 2 pi / M, M >= N)");
  if (xs.count > M)
    throw InvalidArgument("spatial grid count exceeds the transform size");

  const auto Mz = static_cast<std::size_t>(M);
  const auto N = static_cast<std::size_t>(grid.points());
  const double xi = grid.xi_max();

  // per-axis pre-twiddle w_i e^{i x0 h i} and post-twiddle e^{-i x_j Xi}
  std::vector<std::vector<cplx>> pre(static_cast<std::size_t>(n)), post(static_cast<std::size_t>(n));
  for (std::size_t a = 0; a < static_cast<std::size_t>(n); ++a) {
    pre[a].resize(N);
    for (std::size_t i = 0; i < N; ++i)
      pre[a][i] = grid.axis_weight(static_cast<int>(i)) * std::polar(1.0, xs.origin[a] * h * static_cast<double>(i));
    post[a].resize(static_cast<std::size_t>(xs.count));
    for (std::size_t j = 0; j < post[a].size(); ++j)
      post[a][j] = std::polar(1.0, -(xs.origin[a] + xs.spacing * static_cast<double>(j)) * xi);
  }

  std::vector<cplx> out(xs.size());
  if (n == 1) {
    FftBuffer buf(Mz);
    for (std::size_t i = 0; i < N; ++i)
      buf.set(i, g[i] * pre[0][i]);
    fft_inplace(buf, 1, static_cast<int>(M), FFTW_BACKWARD);
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = post[0][j] * buf.get(j);
    return out;
  }

  FftBuffer buf(Mz * Mz);
  for (std::size_t i0 = 0; i0 < N; ++i0)
    for (std::size_t i1 = 0; i1 < N; ++i1)
      buf.set(i0 * Mz + i1, g[i0 * N + i1] * pre[0][i0] * pre[1][i1]);
  fft_inplace(buf, 2, static_cast<int>(M), FFTW_BACKWARD);
  const auto C = static_cast<std::size_t>(xs.count);
  for (std::size_t j0 = 0; j0 < C; ++j0)
    for (std::size_t j1 = 0; j1 < C; ++j1)
      out[j0 * C + j1] = post[0][j0] * post[1][j1] * buf.get(j0 * Mz + j1);
  return out;
}

std::string to_string(CurveMethod method)
{
  return method == CurveMethod::direct ? "direct" : "interpolated";
}

CurveEvaluation evolve_along_curve(const SpectralField& field, const Symbol& sym, const Curve& curve,
                                   std::span<const std::vector<double>> bases, double t, CurveMethod method)
{
  require_dimension(field, sym);
  require_time(t, "evolve_along_curve");
  if (curve.dimension() != field.dimension())
    throw InvalidArgument("curve dimension does not match the field");

  std::vector<std::vector<double>> targets(bases.size());
  for (std::size_t j = 0; j < bases.size(); ++j)
    targets[j] = curve(bases[j], t);

  CurveEvaluation result;
  const int n = field.dimension();
  if (method == CurveMethod::interpolated && n <= 2 && !targets.empty()) {
    const auto& grid = field.grid();
    const int M = next_pow2(8 * grid.points());
    const double dx = two_pi / (M * grid.spacing());
    std::vector<double> lo(static_cast<std::size_t>(n), INFINITY), hi(static_cast<std::size_t>(n), -INFINITY);
    for (const auto& p : targets)
      for (std::size_t a = 0; a < p.size(); ++a) {
        lo[a] = std::min(lo[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    double span = 0.0;
    for (std::size_t a = 0; a < lo.size(); ++a)
      span = std::max(span, hi[a] - lo[a]);
    const int count = static_cast<int>(std::ceil(span / dx)) + 2 * interp_points + 1;
    if (count <= M) {
      std::vector<double> origin(lo.size());
      for (std::size_t a = 0; a < lo.size(); ++a)
        origin[a] = lo[a] - interp_points * dx;
      const auto xs = dual_spatial_grid(grid, M, origin, count);
      const auto samples = evolve_uniform_fast(field, sym, xs, t);
      const auto C = static_cast<std::size_t>(count);
      result.values.resize(targets.size());
      constexpr int half = interp_points / 2 - 1;
      for (std::size_t j = 0; j < targets.size(); ++j) {
        std::array<std::size_t, 2> base{};
        std::array<std::array<double, interp_points>, 2> coef{};
        for (std::size_t a = 0; a < static_cast<std::size_t>(n); ++a) {
          const double u = (targets[j][a] - origin[a]) / dx;
          const auto b = static_cast<long long>(std::floor(u)) - half;
          base[a] = static_cast<std::size_t>(b);
          coef[a] = lagrange_coefficients(u - static_cast<double>(b));
        }
        cplx v = 0.0;
        if (n == 1) {
          for (std::size_t k = 0; k < interp_points; ++k)
            v += coef[0][k] * samples[base[0] + k];
        } else {
          for (std::size_t k0 = 0; k0 < interp_points; ++k0) {
            cplx row = 0.0;
            for (std::size_t k1 = 0; k1 < interp_points; ++k1)
              row += coef[1][k1] * samples[(base[0] + k0) * C + base[1] + k1];
            v += coef[0][k0] * row;
          }
        }
        result.values[j] = v;
      }
      result.method = CurveMethod::interpolated;
      return result;
    }
  }

  result.values = evolve_points(field, sym, targets, t);
  result.method = CurveMethod::direct;
  return result;
}

TaylorResult taylor_evolve(const SpectralField& field, const Symbol& sym, std::span<const double> x, double t,
                           int order)
{
  require_dimension(field, sym);
  require_time(t, "taylor_evolve");
  if (order < 1)
    throw InvalidArgument("taylor_evolve: truncation order must be >= 1");
  if (!field.band())
    throw InvalidArgument("taylor_evolve: field has no declared band, max |P| on its support is undefined");
  if (t == 0.0)
    return {point_eval(field, x), 0.0};

  const auto& grid = field.grid();
  std::vector<double> xi(static_cast<std::size_t>(grid.dimension()));
  std::vector<cplx> v(grid.size());
  double pmax = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (field[k] == cplx{})
      continue;
    grid.point(k, xi);
    const double p = sym(xi);
    pmax = std::max(pmax, std::abs(p));
    const cplx z{0.0, t * p};
    cplx term = 1.0, sum = 1.0;
    for (int j = 1; j <= order; ++j) {
      term *= z / static_cast<double>(j);
      sum += term;
    }
    v[k] = field[k] * sum;
  }

  const double a = t * pmax;
  double term = 1.0;
  for (int j = 1; j <= order; ++j)
    term *= a / j;
  double tail = 0.0;
  for (int j = order + 1; j < order + 10000; ++j) {
    term *= a / j;
    tail += term;
    if (term <= 1e-18 * tail || term == 0.0 || !std::isfinite(tail))
      break;
  }
  return {sum_at(grid, v, x), tail * spectral_l1_norm(field)};
}

SmallTimeBounds small_time_error_bounds(const SpectralField& field, const Symbol& sym, const Curve& curve,
                                        std::span<const double> x, double t)
{
  require_dimension(field, sym);
  if (!(t > 0.0 && t <= 1.0))
    throw InvalidArgument("small_time_error_bounds: time must lie in (0, 1]");
  const auto& grid = field.grid();
  std::vector<double> xi(static_cast<std::size_t>(grid.dimension()));
  double p_moment = 0.0, xi_moment = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double mag = std::abs(field[k]);
    if (mag == 0.0)
      continue;
    grid.point(k, xi);
    const double w = grid.weight(k) * mag;
    p_moment += w * std::abs(sym(xi));
    xi_moment += w * grid.radius(k);
  }
  const auto gx = curve(x, t);
  return {t * p_moment, distance(gx, x) * xi_moment};
}

double lattice_cutoff(double r)
{
  if (r <= 2.0)
    return 1.0;
  if (r >= 3.0)
    return 0.0;
  const double u = 3.0 - r;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

std::vector<cplx> lattice_coefficients(std::span<const double> D, int radius)
{
  const int n = static_cast<int>(D.size());
  if (n < 1 || n > 2)
    throw UnsupportedDimension("lattice coefficients are implemented for n = 1, 2");
  const int M = n == 1 ? 1024 : 256;
  if (radius < 0 || 2 * radius >= M / 2)
    throw InvalidArgument("lattice coefficient radius too large");
  const auto Mz = static_cast<std::size_t>(M);
  const double step = two_pi / M;

  FftBuffer buf(n == 1 ? Mz : Mz * Mz);
  if (n == 1) {
    for (std::size_t j = 0; j < Mz; ++j) {
      const double eta = -std::numbers::pi + step * static_cast<double>(j);
      buf.set(j, lattice_cutoff(std::abs(eta)) * std::polar(1.0, D[0] * eta));
    }
  } else {
    for (std::size_t j0 = 0; j0 < Mz; ++j0)
      for (std::size_t j1 = 0; j1 < Mz; ++j1) {
        const double e0 = -std::numbers::pi + step * static_cast<double>(j0);
        const double e1 = -std::numbers::pi + step * static_cast<double>(j1);
        buf.set(j0 * Mz + j1, lattice_cutoff(std::hypot(e0, e1)) * std::polar(1.0, D[0] * e0 + D[1] * e1));
      }
  }
  fft_inplace(buf, n, M, FFTW_FORWARD);

  const double norm = std::pow(static_cast<double>(M), -n);
  const int side = 2 * radius + 1;
  auto wrap = [&](int l) { return static_cast<std::size_t>((l % M + M) % M); };
  std::vector<cplx> c(static_cast<std::size_t>(n == 1 ? side : side * side));
  for (int a = -radius; a <= radius; ++a) {
    if (n == 1) {
      const double sgn = (a % 2 == 0) ? 1.0 : -1.0;
      c[static_cast<std::size_t>(a + radius)] = sgn * norm * buf.get(wrap(a));
      continue;
    }
    for (int b = -radius; b <= radius; ++b) {
      const double sgn = ((a + b) % 2 == 0) ? 1.0 : -1.0;
      c[static_cast<std::size_t>((a + radius) * side + (b + radius))] = sgn * norm * buf.get(wrap(a) * Mz + wrap(b));
    }
  }
  return c;
}

LatticeCalibration calibrate_lattice(const Curve& curve, double lambda, const Ball& ball, int x_probes, int truncation)
{
  const int n = curve.dimension();
  if (ball.dimension() != n)
    throw InvalidArgument("calibrate_lattice: ball and curve dimensions differ");
  if (!(lambda >= 1.0))
    throw InvalidArgument("calibrate_lattice: lambda must be >= 1");
  if (truncation < 1)
    throw InvalidArgument("calibrate_lattice: truncation must be >= 1");

  const int radius = n == 1 ? 64 : 32;
  const double tmax = std::pow(lambda, -1.0 / curve.alpha());
  std::vector<double> times;
  for (int i = 0; i < 32; ++i)
    times.push_back(tmax * (i + 0.5) / 32.0);
  times.push_back(tmax * (1.0 - 1e-6));

  const auto xs = sample_ball(ball, x_probes, 0xca1);
  std::vector<std::pair<std::vector<double>, double>> probes;
  for (const auto& x : xs)
    for (double t : times)
      probes.emplace_back(x, t);

  std::vector<double> best(probes.size(), 0.0);
  parallel_for(probes.size(), [&](std::size_t p) {
    const auto& [x, t] = probes[p];
    const auto g = curve(x, t);
    std::vector<double> D(g.size());
    for (std::size_t a = 0; a < D.size(); ++a)
      D[a] = lambda * (g[a] - x[a]);
    const auto c = lattice_coefficients(D, radius);
    const int side = 2 * radius + 1;
    double m = 0.0;
    for (std::size_t idx = 0; idx < c.size(); ++idx) {
      double l2 = 0.0;
      if (n == 1) {
        const double l = static_cast<double>(static_cast<int>(idx) - radius);
        l2 = l * l;
      } else {
        const double l0 = static_cast<double>(static_cast<int>(idx) / side - radius);
        const double l1 = static_cast<double>(static_cast<int>(idx) % side - radius);
        l2 = l0 * l0 + l1 * l1;
      }
      m = std::max(m, std::pow(1.0 + std::sqrt(l2), n + 1) * std::abs(c[idx]));
    }
    best[p] = m;
  });

  LatticeCalibration cal;
  cal.constant = 1.1 * *std::max_element(best.begin(), best.end());
  cal.truncation = truncation;
  cal.probes = static_cast<int>(probes.size());

  // weight sums of (1+|l|)^{-(n+1)}: inside the truncation and (nearly) all of Z^n
  const int far = n == 1 ? (1 << 20) : 1024;
  double inside = 0.0, total = 0.0;
  if (n == 1) {
    for (int l = -far; l <= far; ++l) {
      const double w = std::pow(1.0 + std::abs(l), -2.0);
      total += w;
      if (std::abs(l) <= truncation)
        inside += w;
    }
    total += 2.0 / (far + 1.0);
  } else {
    for (int a = -far; a <= far; ++a)
      for (int b = -far; b <= far; ++b) {
        const double w = std::pow(1.0 + std::hypot(a, b), -3.0);
        total += w;
        if (std::abs(a) <= truncation && std::abs(b) <= truncation)
          inside += w;
      }
    total += two_pi / (far + 1.0);
  }
  cal.tail_fraction = (total - inside) / total;
  return cal;
}

LatticeBound lattice_translate_bound(const SpectralField& field, const Symbol& sym, const Curve& curve,
                                     std::span<const double> x, double t, const LatticeCalibration& cal)
{
  require_dimension(field, sym);
  if (!field.band())
    throw InvalidArgument("lattice_translate_bound: field must be band-limited");
  if (curve.dimension() != field.dimension() || x.size() != static_cast<std::size_t>(field.dimension()))
    throw InvalidArgument("lattice_translate_bound: dimension mismatch");
  const double lambda = *field.band();
  const double tmax = std::pow(lambda, -1.0 / curve.alpha());
  if (!(t > 0.0 && t < tmax))
    throw PreconditionViolation("lattice_translate_bound: t = " + std::to_string(t) + " outside (0, lambda^{-1/alpha}) = (0, " +
                                std::to_string(tmax) + ")");

  const auto& grid = field.grid();
  const auto g = evolved_values(field, sym, t);
  LatticeBound out;
  out.lhs = std::abs(sum_at(grid, g, curve(x, t)));

  const int n = field.dimension();
  const int L = cal.truncation;
  std::vector<int> l(static_cast<std::size_t>(n), -L);
  std::vector<double> y(x.size());
  double rhs = 0.0;
  for (;;) {
    double len2 = 0.0;
    for (std::size_t a = 0; a < y.size(); ++a) {
      y[a] = x[a] + l[a] / lambda;
      len2 += static_cast<double>(l[a]) * l[a];
    }
    rhs += cal.constant * std::pow(1.0 + std::sqrt(len2), -(n + 1)) * std::abs(sum_at(grid, g, y));
    std::size_t a = 0;
    while (a < l.size() && ++l[a] > L)
      l[a++] = -L;
    if (a == l.size())
      break;
  }
  out.rhs = rhs;
  return out;
}

} // namespace curveprop
