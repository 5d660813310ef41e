#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace curveprop {

using cplx = std::complex<double>;

/// Uniform tensor grid on [-xi_max, xi_max]^n with `points` nodes per axis.
/// Flat indices are row-major (last axis fastest).
class FrequencyGrid
{
public:
  FrequencyGrid(int n, double xi_max, int points);

  int dimension() const { return n_; }
  double xi_max() const { return xi_max_; }
  int points() const { return points_; }
  double spacing() const { return h_; }
  std::size_t size() const { return size_; }

  /// Coordinate of node i along any axis.
  double node(int i) const { return -xi_max_ + h_ * i; }
  /// Trapezoidal weight of node i along one axis (h, halved at both ends).
  double axis_weight(int i) const;
  /// Tensor-product quadrature weight of a flat index.
  double weight(std::size_t flat) const;
  /// Axis indices of a flat index.
  void indices(std::size_t flat, std::span<int> out) const;
  /// Frequency coordinates of a flat index.
  void point(std::size_t flat, std::span<double> out) const;
  std::vector<double> point(std::size_t flat) const;
  double radius(std::size_t flat) const;

  bool operator==(const FrequencyGrid&) const = default;

private:
  int n_;
  double xi_max_;
  int points_;
  double h_;
  std::size_t size_;
};

/// Fourier samples of f on a FrequencyGrid, f(x) = integral e^{i x.xi} fhat(xi) dxi.
/// When `band` is set the samples vanish outside band/2 <= |xi| <= 2 band.
class SpectralField
{
public:
  SpectralField(FrequencyGrid grid, std::vector<cplx> fhat, std::optional<double> band = std::nullopt);

  const FrequencyGrid& grid() const { return grid_; }
  int dimension() const { return grid_.dimension(); }
  std::span<const cplx> values() const { return fhat_; }
  const cplx& operator[](std::size_t flat) const { return fhat_[flat]; }
  std::optional<double> band() const { return band_; }

  bool operator==(const SpectralField&) const = default;

private:
  FrequencyGrid grid_;
  std::vector<cplx> fhat_;
  std::optional<double> band_;
};

struct SobolevProfile
{
  double s = 0.0;
  std::uint64_t seed = 0;
};

/// Exponent offset in the Sobolev profile decay law.
inline constexpr double sobolev_profile_epsilon = 0.01;

SpectralField make_gaussian(const FrequencyGrid& grid, double width);
SpectralField make_zero(const FrequencyGrid& grid);
/// Complex normal samples on the annulus lambda/2 <= |xi| <= 2 lambda,
/// scaled to unit spectral L2 norm.
SpectralField make_band_limited_random(const FrequencyGrid& grid, double lambda, std::uint64_t seed);
/// |fhat| = (1+|xi|^2)^{-(s + n/2 + eps)/2} with seeded random phases.
SpectralField make_sobolev_profile(const FrequencyGrid& grid, const SobolevProfile& profile);

/// Trapezoidal quadrature of integral e^{i x.xi} fhat(xi) dxi.
cplx point_eval(const SpectralField& field, std::span<const double> x);

/// sqrt of integral (1+|xi|^2)^s |fhat|^2 dxi.
double sobolev_norm(const SpectralField& field, double s);
double spectral_l2_norm(const SpectralField& field);
/// integral |fhat| dxi.
double spectral_l1_norm(const SpectralField& field);
/// max |fhat| over the grid.
double spectral_max(const SpectralField& field);

/// Sum over the grid of weight * values[k] * prod_a table_a[idx_a], where
/// table_a has one entry per axis node. Shared by every direct quadrature.
cplx tensor_sum(const FrequencyGrid& grid, std::span<const cplx> values,
                std::span<const std::vector<cplx>> tables);

/// Per-axis tables e^{i x_a xi_i} for a point x.
std::vector<std::vector<cplx>> exponential_tables(const FrequencyGrid& grid, std::span<const double> x);

void write_field(const std::filesystem::path& path, const SpectralField& field);
SpectralField read_field(const std::filesystem::path& path);

} // namespace curveprop
