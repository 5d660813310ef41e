#pragma once

#include "curveprop/curve.hpp"
#include "curveprop/fields.hpp"
#include "curveprop/propagator.hpp"
#include "curveprop/symbol.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace curveprop {

/// RMS over base points of |e^{itP(D)} f(gamma(x,t)) - f(x)| at each time.
struct ErrorCurve
{
  std::vector<double> times;
  std::vector<double> values;
  CurveMethod method = CurveMethod::direct;
};

/// Times must be strictly decreasing in (0, 1].
ErrorCurve error_curve(const SpectralField& field, const Symbol& sym, const Curve& curve,
                       std::span<const std::vector<double>> bases, std::span<const double> times,
                       CurveMethod method = CurveMethod::direct);

/// t_j = 2^{-j} for j = first..last.
std::vector<double> dyadic_times(int first, int last);

struct FitWindow
{
  std::size_t begin = 0;
  std::size_t end = 0; ///< one past the last index
};

struct RateFit
{
  double theta = 0.0;
  double residual = 0.0;
  FitWindow window;
};

/// Indices with t_min <= t <= t_max.
FitWindow time_window(const ErrorCurve& ec, double t_min, double t_max);

/// Slope of log E against log t over the window. Throws NoiseFloorError
/// when a value in the window is at or below 1e-14.
RateFit fit_rate(const ErrorCurve& ec, FitWindow window);
RateFit fit_rate(const ErrorCurve& ec);

/// alpha delta / m for 0 <= delta < m.
double predicted_rate(double alpha, double delta, double m);
/// delta / ((m1 - 1) m2) for 0 <= delta < m2.
double predicted_rate_polynomial2d(int m1, int m2, double delta);

struct MaximalEstimate
{
  double p = 2.0;
  double value = 0.0;
  std::size_t time_points = 0;
  std::size_t space_points = 0;
  /// Discrete L^p norm over the ball at each grid time.
  std::vector<double> fixed_time_norms;
};

/// Cell-centered lattice points inside the ball, about `target` of them.
std::vector<std::vector<double>> ball_lattice(const Ball& ball, int target);

/// Log-spaced times in (0, 1) plus, when lambda is given, the endpoints of
/// the time tiling of length lambda^{1-m1} that fall inside (0, 1).
std::vector<double> maximal_time_grid(int log_points, std::optional<double> lambda = std::nullopt, int m1 = 2);

/// Discrete L^p(ball) norm of max over t_grid of |e^{itP(D)} f(gamma(x,t))|.
MaximalEstimate maximal_lp(const SpectralField& field, const Symbol& sym, const Curve& curve, const Ball& ball,
                           double p, std::span<const double> t_grid, int space_points = 64);

struct SweepSample
{
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double ratio = 0.0;
};

struct SweepResult
{
  double slope = 0.0;
  std::vector<SweepSample> samples;
  std::vector<double> lambdas;
  std::vector<double> mean_ratios;
};

struct SweepOptions
{
  double p = 2.0;
  Ball ball{{0.0}, 1.0};
  int log_time_points = 64;
  int space_points = 64;
};

/// Slope of log(mean ratio) against log lambda.
double sweep_slope(std::span<const double> lambdas, std::span<const double> mean_ratios);

/// For each dyadic lambda and seed, maximal_lp of unit band-limited random
/// data; returns the fitted growth exponent of the mean ratio.
SweepResult exponent_sweep(const FrequencyGrid& grid, const Symbol& sym, const Curve& curve,
                           std::span<const double> lambdas, std::span<const std::uint64_t> seeds,
                           const SweepOptions& options);

struct LowerBoundResult
{
  double liminf_ratio = 0.0;
  double floor = 0.0;
  bool passed = false;
  std::vector<double> times;
  /// RMS_x E(t) / t^alpha at each time.
  std::vector<double> ratios;
};

/// Along gamma(x,t) = x - e_1 t^alpha, compares E(t)/t^alpha at the three
/// smallest times with half the RMS of |integral e^{ix.xi} xi_1 fhat dxi|.
LowerBoundResult lower_bound_check(const SpectralField& field, const Symbol& sym, double alpha,
                                   std::span<const std::vector<double>> bases,
                                   std::span<const double> times = {});

/// sum_{k=k_min}^{k_max} 2^{-(s+delta)k} u_k with u_k unit band-limited
/// random data at lambda = 2^k.
SpectralField make_graded_data(const FrequencyGrid& grid, double s, double delta, std::uint64_t seed, int k_min,
                               int k_max);

struct SmallTimeCheck
{
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// max of E / (osc_bound + shift_bound).
  double worst_ratio = 0.0;
};

/// Pointwise check of |e^{itP}f(gamma(x,t)) - f(x)| <= osc + shift bound.
SmallTimeCheck small_time_check(const SpectralField& field, const Symbol& sym, const Curve& curve,
                                std::span<const std::vector<double>> bases, std::span<const double> times);

} // namespace curveprop
