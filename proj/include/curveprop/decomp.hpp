#pragma once

#include "curveprop/curve.hpp"
#include "curveprop/fields.hpp"

#include <span>
#include <vector>

namespace curveprop {

/// Smooth radial Littlewood-Paley partition psi_0, ..., psi_{levels-1}.
/// psi_0 is supported in |xi| < 2 and psi_k (k >= 1) in
/// 2^{k-1} < |xi| < 2^{k+1}; the filters sum to one for |xi| < 2^levels.
class FilterBank
{
public:
  explicit FilterBank(int levels);
  /// Enough levels to cover every node of the grid.
  static FilterBank covering(const FrequencyGrid& grid);

  int levels() const { return levels_; }
  double operator()(int k, double r) const;
  /// All filter values at radius r.
  std::vector<double> values(double r) const;

private:
  double raw(int k, double r) const;
  int levels_;
};

struct DyadicPiece
{
  int k = 0;
  SpectralField field;
};

/// fhat_k = psi_k fhat; piece k >= 1 carries the declared band 2^k.
std::vector<DyadicPiece> dyadic_decompose(const SpectralField& field);
std::vector<DyadicPiece> dyadic_decompose(const SpectralField& field, const FilterBank& bank);

/// rho_k(xi) = |xi_1| / 2^{m2 k / m1} + |xi_2| / 2^k.
double anisotropic_rho(int k, int m1, int m2, std::span<const double> xi);

struct AnisotropicTiling
{
  int m1 = 2;
  int m2 = 2;
  double lambda = 1.0;
  /// Tiles whose level set rho_k = 1 meets the circle |xi| = lambda.
  std::vector<int> active;
  /// Every tile used by the smooth partition of the annulus.
  std::vector<int> tiles;
  /// Half-width in log2(rho_k) of each tile's window.
  double window = 1.0;
};

AnisotropicTiling anisotropic_tiling(double lambda, int m1, int m2);

struct AnisotropicPiece
{
  int k = 0;
  bool active = false;
  SpectralField field;
};

struct AnisotropicDecomposition
{
  AnisotropicTiling tiling;
  std::vector<AnisotropicPiece> pieces;
};

/// Smooth partition of a band-limited 2-D field subordinate to the tiles.
AnisotropicDecomposition anisotropic_decompose(const SpectralField& field, int m1, int m2);

struct TimeInterval
{
  double start = 0.0;
  double end = 0.0;
  /// The final interval includes its right endpoint 1.
  bool closed = false;

  bool contains(double t) const { return t >= start && (t < end || (closed && t == end)); }
};

struct TimeTiling
{
  double lambda = 1.0;
  int m1 = 2;
  double length = 1.0;
  std::vector<TimeInterval> intervals;

  /// Number of intervals containing t.
  int coverage(double t) const;
};

TimeTiling time_intervals(double lambda, int m1);

struct KernelParams
{
  int m1 = 2;
  int m2 = 2;
  int sigma = 1;
  double lambda = 16.0;
  int k = 4;
};

struct KernelValue
{
  cplx value;
  /// Psi vanishes identically for this (k, lambda).
  bool empty_support = false;
  /// Estimated round-off level of `value`.
  double noise_floor = 0.0;
};

/// Smooth annular bump psi(eta) = Phi(eta/2) - Phi(2 eta) with a separable
/// C^2 cutoff Phi; vanishes for max|eta_i| < 1/4 and for max|eta_i| >= 2.
double kernel_bump(double eta1, double eta2);

/// Psi(xi) = psi(xi_1 / 2^{m2 k/m1}, xi_2 / 2^k) psi(xi / lambda).
double kernel_window(const KernelParams& p, double xi1, double xi2);

/// integral e^{i (gamma(x,t) - gamma(y,t')).xi + i (t - t') P(xi)} Psi(xi)^2 dxi
/// with P = xi_1^m1 + sigma xi_2^m2. Time-independent curves accept any
/// real t, t'.
KernelValue kernel_eval(const KernelParams& p, const Curve& curve, std::span<const double> x,
                        std::span<const double> y, double t, double tp);

struct KernelSample
{
  double separation = 0.0;
  double abs_k = 0.0;
  double noise_floor = 0.0;
};

struct KernelDecayFit
{
  double slope = 0.0;
  double residual = 0.0;
  /// Fewer than two samples rose above round-off; slope is then 0.
  bool underflow = false;
  std::vector<KernelSample> samples;
};

/// Fits log|K| against log|t - t'| with t' = 0, t = separation.
KernelDecayFit kernel_decay_fit(const KernelParams& p, const Curve& curve, std::span<const double> x,
                                std::span<const double> y, std::span<const double> separations);

} // namespace curveprop
