#pragma once

#include "curveprop/curve.hpp"
#include "curveprop/fields.hpp"
#include "curveprop/symbol.hpp"

#include <span>
#include <string>
#include <vector>

namespace curveprop {

/// Pointwise multiplier e^{i t P(xi)} on the field's grid.
std::vector<cplx> multiplier(const FrequencyGrid& grid, const Symbol& sym, double t);

/// The evolved spectrum e^{itP} fhat as a field with the same declared band.
SpectralField evolve_field(const SpectralField& field, const Symbol& sym, double t);

/// Quadrature of integral e^{i x.xi + i t P(xi)} fhat(xi) dxi. At t = 0 this
/// is point_eval exactly.
cplx evolve_at(const SpectralField& field, const Symbol& sym, std::span<const double> x, double t);

/// evolve_at for many points at one time; the multiplier is applied once.
std::vector<cplx> evolve_points(const SpectralField& field, const Symbol& sym,
                                std::span<const std::vector<double>> points, double t);

/// Uniform spatial grid with the same spacing and count on every axis.
struct SpatialGrid
{
  std::vector<double> origin;
  double spacing = 0.0;
  int count = 0;

  int dimension() const { return static_cast<int>(origin.size()); }
  std::size_t size() const;
  std::vector<double> point(std::size_t flat) const;
};

/// Spatial grid whose spacing is dual to the frequency spacing,
/// spacing * h = 2 pi / transform_size. transform_size >= grid points.
SpatialGrid dual_spatial_grid(const FrequencyGrid& grid, int transform_size, std::vector<double> origin,
                              int count);

/// Evolution on every node of a dual spatial grid through an inverse FFT.
/// Values are row-major in the spatial grid. n >= 3 uses the direct sum.
std::vector<cplx> evolve_uniform_fast(const SpectralField& field, const Symbol& sym, const SpatialGrid& xs,
                                      double t);

enum class CurveMethod
{
  direct,
  interpolated,
};

std::string to_string(CurveMethod method);

struct CurveEvaluation
{
  std::vector<cplx> values;
  /// Method actually used; the interpolated path falls back to direct when
  /// the targets do not fit one transform period.
  CurveMethod method = CurveMethod::direct;
};

/// evolve_at(gamma(x_j, t), t) for each base point.
CurveEvaluation evolve_along_curve(const SpectralField& field, const Symbol& sym, const Curve& curve,
                                   std::span<const std::vector<double>> bases, double t,
                                   CurveMethod method = CurveMethod::direct);

struct TaylorResult
{
  cplx value;
  double tail_bound = 0.0;
};

/// Order-J Taylor expansion of e^{itP} applied to a band-limited field.
TaylorResult taylor_evolve(const SpectralField& field, const Symbol& sym, std::span<const double> x, double t,
                           int order);

struct SmallTimeBounds
{
  double osc_bound = 0.0;
  double shift_bound = 0.0;
};

SmallTimeBounds small_time_error_bounds(const SpectralField& field, const Symbol& sym, const Curve& curve,
                                        std::span<const double> x, double t);

/// Smooth radial cutoff equal to 1 on B(0,2) and 0 outside B(0,3).
double lattice_cutoff(double r);

struct LatticeCalibration
{
  double constant = 0.0;
  /// Weight of the lattice terms beyond the truncation relative to the
  /// full weight sum.
  double tail_fraction = 0.0;
  int truncation = 8;
  int probes = 0;
};

/// Fourier coefficients c_l of phi(eta) e^{i D.eta} on [-pi, pi]^n for
/// |l|_inf <= radius, row-major over l in [-radius, radius]^n.
std::vector<cplx> lattice_coefficients(std::span<const double> D, int radius);

/// Computes C_n = 1.1 * max over probes and l of (1+|l|)^{n+1} |c_l| with
/// D = lambda (gamma(x,t) - x), probing x in the ball and t in
/// (0, lambda^{-1/alpha}).
LatticeCalibration calibrate_lattice(const Curve& curve, double lambda, const Ball& ball, int x_probes = 8,
                                     int truncation = 8);

struct LatticeBound
{
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
};

LatticeBound lattice_translate_bound(const SpectralField& field, const Symbol& sym, const Curve& curve,
                                     std::span<const double> x, double t, const LatticeCalibration& cal);

} // namespace curveprop
