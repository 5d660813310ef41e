#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace curveprop {

enum class CurveKind
{
  vertical,     ///< gamma(x,t) = x
  shift,        ///< gamma(x,t) = x - v t^alpha
  linear_drift, ///< gamma(x,t) = x + t v
  tabulated,    ///< piecewise-linear-in-t affine maps x -> A(t) x + b(t)
};

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& name);

/// One node of a tabulated curve: gamma(x, time) = matrix * x + offset,
/// matrix stored row-major.
struct AffineKnot
{
  double time = 0.0;
  std::vector<double> matrix;
  std::vector<double> offset;

  bool operator==(const AffineKnot&) const = default;
};

struct Ball
{
  std::vector<double> center;
  double radius = 1.0;

  int dimension() const { return static_cast<int>(center.size()); }
  /// Lebesgue measure of the ball.
  double volume() const;

  bool operator==(const Ball&) const = default;
};

/// A curve family gamma(x, t) on R^n x [0, 1] with gamma(x, 0) = x and a
/// declared Hoelder exponent alpha in (0, 1].
class Curve
{
public:
  static Curve vertical(int n);
  static Curve shift(std::vector<double> direction, double alpha);
  static Curve linear_drift(std::vector<double> velocity);
  /// Knots must start at t = 0 with the identity map, end at t = 1 and have
  /// strictly increasing times.
  static Curve tabulated(int n, std::vector<AffineKnot> knots, double alpha = 1.0);

  int dimension() const { return n_; }
  CurveKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& direction() const { return direction_; }
  const std::vector<AffineKnot>& knots() const { return knots_; }

  /// True when gamma(x, t) = x for every t (the vertical family). Such
  /// curves are defined for all real t.
  bool time_independent() const { return kind_ == CurveKind::vertical; }

  /// gamma(x, t). Throws InvalidArgument for t outside [0, 1] or a
  /// dimension mismatch.
  std::vector<double> operator()(std::span<const double> x, double t) const;
  void eval_into(std::span<const double> x, double t, std::span<double> out) const;

  bool operator==(const Curve&) const = default;

private:
  Curve() = default;

  CurveKind kind_ = CurveKind::vertical;
  int n_ = 1;
  double alpha_ = 1.0;
  std::vector<double> direction_;
  std::vector<AffineKnot> knots_;
};

std::vector<double> eval_curve(const Curve& c, std::span<const double> x, double t);

/// Deterministic quasi-uniform points in a ball (rejection sampling with a
/// counter-based generator); the first point is the center.
std::vector<std::vector<double>> sample_ball(const Ball& ball, int count, std::uint64_t seed = 0);

struct HolderEstimate
{
  double alpha = 1.0;
  /// True when gamma does not move in t; alpha is then the sentinel 1.
  bool no_variation = false;
  /// max over gaps of D(g) / g^alpha, the empirical Hoelder constant.
  double constant = 0.0;
};

/// Fits alpha from sup_x |gamma(x,t+g) - gamma(x,t)| over dyadic gaps
/// g = 2^-1 ... 2^-t_samples.
HolderEstimate estimate_holder(const Curve& c, const Ball& ball, int x_samples, int t_samples);

struct BilipschitzBounds
{
  double lower = 0.0;
  double upper = 0.0;
};

/// min / max of |gamma(x,t) - gamma(y,t)| / |x - y| over sampled pairs in the
/// ball. The first 2n pairs are separated along +-coordinate axes.
BilipschitzBounds estimate_bilipschitz(const Curve& c, const Ball& ball, double t, int x_pairs,
                                       std::uint64_t seed = 0);

} // namespace curveprop
