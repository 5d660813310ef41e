#include "curveprop/curve.hpp"
#include "curveprop/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace curveprop;

namespace {

Curve diagonal_scaling()
{
  // gamma(x, t) = ((1 + t) x1, x2)
  std::vector<AffineKnot> knots{{0.0, {1, 0, 0, 1}, {0, 0}}, {1.0, {2, 0, 0, 1}, {0, 0}}};
  return Curve::tabulated(2, knots, 1.0);
}

} // namespace

TEST_CASE("curve evaluation")
{
  const std::vector<double> x{0.3, -0.2};
  CHECK(eval_curve(Curve::vertical(2), x, 0.7) == x);
  const std::vector<double> y{1.0, 0.0};
  const auto s = eval_curve(Curve::shift({1.0, 0.0}, 0.5), y, 0.25);
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s[1] == 0.0);
  const auto d = eval_curve(Curve::linear_drift({1.0, -2.0}), x, 0.5);
  CHECK(d[0] == doctest::Approx(0.8));
  CHECK(d[1] == doctest::Approx(-1.2));
  const auto m = eval_curve(diagonal_scaling(), x, 0.5);
  CHECK(m[0] == doctest::Approx(0.45));
  CHECK(m[1] == doctest::Approx(-0.2));

  for (const auto& c : {Curve::vertical(2), Curve::shift({0.6, 0.8}, 0.3), Curve::linear_drift({2.0, 1.0}),
                        diagonal_scaling()})
    CHECK(eval_curve(c, x, 0.0) == x);
}

TEST_CASE("curve validation")
{
  const std::vector<double> x{0.0};
  CHECK_THROWS_AS(eval_curve(Curve::shift({1.0}, 0.5), x, 1.5), InvalidArgument);
  CHECK_THROWS_AS(eval_curve(Curve::shift({1.0}, 0.5), x, -0.1), InvalidArgument);
  CHECK_NOTHROW(eval_curve(Curve::vertical(1), x, 3.0));
  CHECK_THROWS_AS(Curve::shift({1.0}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(Curve::shift({1.0}, 1.5), InvalidArgument);
  const std::vector<double> x2{0.0, 0.0};
  CHECK_THROWS_AS(eval_curve(Curve::vertical(1), x2, 0.1), InvalidArgument);
  // knots must start at the identity
  std::vector<AffineKnot> bad{{0.0, {2}, {0}}, {1.0, {1}, {0}}};
  CHECK_THROWS_AS(Curve::tabulated(1, bad), InvalidArgument);
  std::vector<AffineKnot> unordered{{0.0, {1}, {0}}, {0.7, {1}, {1}}, {0.5, {1}, {0}}, {1.0, {1}, {0}}};
  CHECK_THROWS_AS(Curve::tabulated(1, unordered), InvalidArgument);
  CHECK_THROWS_AS(curve_kind_from_string("spiral"), InvalidArgument);
}

TEST_CASE("hoelder estimates")
{
  const Ball ball{{0.0, 0.0}, 1.0};
  for (double a : {0.25, 0.5, 0.75, 1.0}) {
    const auto h = estimate_holder(Curve::shift({1.0, 0.0}, a), ball, 16, 16);
    CHECK(std::abs(h.alpha - a) <= 0.05);
    CHECK_FALSE(h.no_variation);
  }
  const auto half = estimate_holder(Curve::shift({1.0, 0.0}, 0.5), ball, 16, 16);
  CHECK(half.alpha >= 0.48);
  CHECK(half.alpha <= 0.52);
  const auto drift = estimate_holder(Curve::linear_drift({1.0, 1.0}), ball, 16, 16);
  CHECK(drift.alpha >= 0.98);
  CHECK(drift.alpha <= 1.02);
  const auto v = estimate_holder(Curve::vertical(2), ball, 16, 16);
  CHECK(v.alpha == 1.0);
  CHECK(v.no_variation);
  CHECK_THROWS_AS(estimate_holder(Curve::vertical(2), ball, 4, 16), InvalidArgument);
}

TEST_CASE("bilipschitz bounds")
{
  const Ball ball{{0.0, 0.0}, 1.0};
  for (double t : {0.0, 0.3, 1.0}) {
    const auto v = estimate_bilipschitz(Curve::vertical(2), ball, t, 64);
    CHECK(v.lower == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.upper == doctest::Approx(1.0).epsilon(1e-12));
    const auto s = estimate_bilipschitz(Curve::shift({1.0, 0.0}, 0.5), ball, t, 64);
    CHECK(s.lower == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.upper == doctest::Approx(1.0).epsilon(1e-12));
    const auto d = estimate_bilipschitz(Curve::linear_drift({0.5, 0.5}), ball, t, 64);
    CHECK(d.lower == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto m = estimate_bilipschitz(diagonal_scaling(), ball, 1.0, 64);
  CHECK(std::abs(m.lower - 1.0) < 1e-6);
  CHECK(std::abs(m.upper - 2.0) < 1e-6);
  for (double t : {0.1, 0.5, 0.9}) {
    const auto b = estimate_bilipschitz(diagonal_scaling(), ball, t, 64);
    CHECK(b.lower > 0.0);
    CHECK(std::isfinite(b.upper));
  }
}

TEST_CASE("continuity in time")
{
  const std::vector<double> x{0.2, 0.1};
  for (double a : {0.25, 0.5, 1.0}) {
    const auto c = Curve::shift({1.0, 0.0}, a);
    double prev = 0.0;
    for (int j = 2; j <= 12; ++j) {
      const double h = std::ldexp(1.0, -j);
      const auto p = eval_curve(c, x, 0.0);
      const auto q = eval_curve(c, x, h);
      const double disp = std::hypot(q[0] - p[0], q[1] - p[1]);
      if (j > 2)
        CHECK(disp * std::pow(2.0, a) <= prev * 1.2);
      prev = disp;
    }
  }
}

TEST_CASE("ball sampling")
{
  const Ball ball{{1.0, -1.0}, 0.5};
  const auto pts = sample_ball(ball, 50, 3);
  REQUIRE(pts.size() == 50);
  CHECK(pts.front() == ball.center);
  for (const auto& p : pts)
    CHECK(std::hypot(p[0] - 1.0, p[1] + 1.0) <= 0.5);
  CHECK(sample_ball(ball, 50, 3) == pts);
  CHECK(Ball{{0.0, 0.0}, 2.0}.volume() == doctest::Approx(4.0 * std::acos(-1.0)));
}
