#include "curveprop/fields.hpp"

#include "curveprop/errors.hpp"
#include "curveprop/rng.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace curveprop {

namespace {

constexpr std::array<char, 8> field_magic{'C', 'P', 'F', 'I', 'E', 'L', 'D', '1'};

void put_u64(std::ostream& os, std::uint64_t v)
{
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i)
    b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b.data(), 8);
}

void put_u32(std::ostream& os, std::uint32_t v)
{
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i)
    b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b.data(), 4);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is)
{
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i)
    v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

std::uint32_t get_u32(std::istream& is)
{
  std::array<unsigned char, 4> b{};
  is.read(reinterpret_cast<char*>(b.data()), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i)
    v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

bool in_annulus(double r, double lambda) { return r >= lambda / 2.0 && r <= 2.0 * lambda; }

} // namespace

FrequencyGrid::FrequencyGrid(int n, double xi_max, int points)
  : n_(n), xi_max_(xi_max), points_(points), h_(0.0), size_(1)
{
  if (n < 1)
    throw InvalidArgument("frequency grid dimension must be positive");
  if (!(xi_max > 0.0) || !std::isfinite(xi_max))
    throw InvalidArgument("frequency grid half-width must be positive");
  if (points < 8)
    throw InvalidArgument("frequency grid needs at least 8 points per axis");
  h_ = 2.0 * xi_max / (points - 1);
  for (int a = 0; a < n; ++a)
    size_ *= static_cast<std::size_t>(points);
}

double FrequencyGrid::axis_weight(int i) const
{
  return (i == 0 || i == points_ - 1) ? 0.5 * h_ : h_;
}

double FrequencyGrid::weight(std::size_t flat) const
{
  double w = 1.0;
  for (int a = 0; a < n_; ++a) {
    w *= axis_weight(static_cast<int>(flat % static_cast<std::size_t>(points_)));
    flat /= static_cast<std::size_t>(points_);
  }
  return w;
}

void FrequencyGrid::indices(std::size_t flat, std::span<int> out) const
{
  for (int a = n_ - 1; a >= 0; --a) {
    out[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(points_));
    flat /= static_cast<std::size_t>(points_);
  }
}

void FrequencyGrid::point(std::size_t flat, std::span<double> out) const
{
  for (int a = n_ - 1; a >= 0; --a) {
    out[static_cast<std::size_t>(a)] = node(static_cast<int>(flat % static_cast<std::size_t>(points_)));
    flat /= static_cast<std::size_t>(points_);
  }
}

std::vector<double> FrequencyGrid::point(std::size_t flat) const
{
  std::vector<double> p(static_cast<std::size_t>(n_));
  point(flat, p);
  return p;
}

double FrequencyGrid::radius(std::size_t flat) const
{
  double r2 = 0.0;
  for (int a = 0; a < n_; ++a) {
    const double v = node(static_cast<int>(flat % static_cast<std::size_t>(points_)));
    r2 += v * v;
    flat /= static_cast<std::size_t>(points_);
  }
  return std::sqrt(r2);
}

SpectralField::SpectralField(FrequencyGrid grid, std::vector<cplx> fhat, std::optional<double> band)
  : grid_(std::move(grid)), fhat_(std::move(fhat)), band_(band)
{
  if (fhat_.size() != grid_.size())
    throw InvalidArgument("spectral field has " + std::to_string(fhat_.size()) + " samples, grid has " +
                          std::to_string(grid_.size()));
  double peak = 0.0;
  for (const auto& v : fhat_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw DataIntegrityError("spectral field contains a non-finite sample");
    peak = std::max(peak, std::abs(v));
  }
  if (band_) {
    if (!(*band_ > 0.0) || !std::isfinite(*band_))
      throw InvalidArgument("declared band must be positive");
    for (std::size_t k = 0; k < fhat_.size(); ++k)
      if (!in_annulus(grid_.radius(k), *band_) && std::abs(fhat_[k]) > 1e-14 * peak)
        throw InvalidArgument("spectral field does not vanish outside the declared annulus");
  }
}

SpectralField make_gaussian(const FrequencyGrid& grid, double width)
{
  if (!(width > 0.0))
    throw InvalidArgument("gaussian width must be positive");
  std::vector<cplx> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double r = grid.radius(k);
    v[k] = std::exp(-(r * r) / (width * width));
  }
  return SpectralField(grid, std::move(v));
}

SpectralField make_zero(const FrequencyGrid& grid)
{
  return SpectralField(grid, std::vector<cplx>(grid.size()));
}

SpectralField make_band_limited_random(const FrequencyGrid& grid, double lambda, std::uint64_t seed)
{
  if (!(lambda >= 1.0))
    throw InvalidArgument("band-limited data needs lambda >= 1");
  if (2.0 * lambda > grid.xi_max())
    throw InvalidArgument("annulus |xi| <= 2 lambda exceeds the frequency grid");
  const CounterRng rng(seed, 0xf1e1d);
  std::vector<cplx> v(grid.size());
  double energy = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!in_annulus(grid.radius(k), lambda))
      continue;
    v[k] = rng.complex_normal(k);
    energy += grid.weight(k) * std::norm(v[k]);
  }
  if (energy == 0.0)
    throw InvalidArgument("annulus contains no grid points; refine the grid");
  const double scale = 1.0 / std::sqrt(energy);
  for (auto& c : v)
    c *= scale;
  return SpectralField(grid, std::move(v), lambda);
}

SpectralField make_sobolev_profile(const FrequencyGrid& grid, const SobolevProfile& profile)
{
  const double decay = profile.s + grid.dimension() / 2.0 + sobolev_profile_epsilon;
  const CounterRng rng(profile.seed, 0x50b0);
  std::vector<cplx> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double r = grid.radius(k);
    const double mag = std::pow(1.0 + r * r, -decay / 2.0);
    v[k] = std::polar(mag, 2.0 * std::numbers::pi * rng.uniform(k));
  }
  return SpectralField(grid, std::move(v));
}

std::vector<std::vector<cplx>> exponential_tables(const FrequencyGrid& grid, std::span<const double> x)
{
  if (x.size() != static_cast<std::size_t>(grid.dimension()))
    throw InvalidArgument("evaluation point has dimension " + std::to_string(x.size()) + ", field has " +
                          std::to_string(grid.dimension()));
  std::vector<std::vector<cplx>> tables(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (!std::isfinite(x[a]))
      throw InvalidArgument("evaluation point must be finite");
    auto& t = tables[a];
    t.resize(static_cast<std::size_t>(grid.points()));
    for (int i = 0; i < grid.points(); ++i)
      t[static_cast<std::size_t>(i)] = std::polar(1.0, x[a] * grid.node(i));
  }
  return tables;
}

cplx tensor_sum(const FrequencyGrid& grid, std::span<const cplx> values, std::span<const std::vector<cplx>> tables)
{
  const auto N = static_cast<std::size_t>(grid.points());
  const int n = grid.dimension();
  std::vector<double> w(N);
  for (std::size_t i = 0; i < N; ++i)
    w[i] = grid.axis_weight(static_cast<int>(i));

  // contract the last axis repeatedly
  std::vector<cplx> cur(values.begin(), values.end());
  for (int a = n - 1; a >= 0; --a) {
    const auto& t = tables[static_cast<std::size_t>(a)];
    const std::size_t rows = cur.size() / N;
    std::vector<cplx> next(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const cplx* row = cur.data() + r * N;
      double re = 0.0, im = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        const cplx p = row[j] * t[j];
        re += w[j] * p.real();
        im += w[j] * p.imag();
      }
      next[r] = {re, im};
    }
    cur = std::move(next);
  }
  return cur.front();
}

cplx point_eval(const SpectralField& field, std::span<const double> x)
{
  const auto tables = exponential_tables(field.grid(), x);
  return tensor_sum(field.grid(), field.values(), tables);
}

double sobolev_norm(const SpectralField& field, double s)
{
  const auto& g = field.grid();
  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double r = g.radius(k);
    sum += g.weight(k) * std::pow(1.0 + r * r, s) * std::norm(field[k]);
  }
  return std::sqrt(sum);
}

double spectral_l2_norm(const SpectralField& field) { return sobolev_norm(field, 0.0); }

double spectral_l1_norm(const SpectralField& field)
{
  const auto& g = field.grid();
  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    sum += g.weight(k) * std::abs(field[k]);
  return sum;
}

double spectral_max(const SpectralField& field)
{
  double m = 0.0;
  for (const auto& v : field.values())
    m = std::max(m, std::abs(v));
  return m;
}

void write_field(const std::filesystem::path& path, const SpectralField& field)
{
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw IoError("cannot open field file for writing", path.string());
  const auto& g = field.grid();
  os.write(field_magic.data(), field_magic.size());
  put_u32(os, static_cast<std::uint32_t>(g.dimension()));
  put_u32(os, static_cast<std::uint32_t>(g.points()));
  put_f64(os, g.xi_max());
  put_u32(os, field.band() ? 1u : 0u);
  put_u32(os, 0u);
  put_f64(os, field.band().value_or(0.0));
  for (const auto& v : field.values()) {
    put_f64(os, v.real());
    put_f64(os, v.imag());
  }
  if (!os)
    throw IoError("failed writing field file", path.string());
}

SpectralField read_field(const std::filesystem::path& path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoError("cannot open field file", path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != field_magic)
    throw DataIntegrityError("not a field file (bad magic): " + path.string());
  const auto n = static_cast<int>(get_u32(is));
  const auto points = static_cast<int>(get_u32(is));
  const double xi_max = get_f64(is);
  const bool has_band = get_u32(is) != 0;
  get_u32(is);
  const double band = get_f64(is);
  if (!is || n < 1 || n > 3)
    throw DataIntegrityError("corrupt field header: " + path.string());
  FrequencyGrid grid(n, xi_max, points);
  std::vector<cplx> v(grid.size());
  for (auto& c : v) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    c = {re, im};
  }
  if (!is)
    throw DataIntegrityError("field file truncated: " + path.string());
  if (is.peek() != std::char_traits<char>::eof())
    throw DataIntegrityError("field file has trailing bytes: " + path.string());
  return SpectralField(std::move(grid), std::move(v), has_band ? std::optional<double>(band) : std::nullopt);
}

} // namespace curveprop
