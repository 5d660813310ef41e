#include "curveprop/errors.hpp"
#include "curveprop/experiments.hpp"
#include "curveprop/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace curveprop;

namespace {

cplx gaussian_oracle(double x, double t)
{
  const cplx a(1.0, -t);
  return std::sqrt(std::acos(-1.0) / a) * std::exp(-x * x / (4.0 * a));
}

ErrorCurve synthetic(double (*law)(double, int))
{
  ErrorCurve ec;
  for (int j = 3; j <= 12; ++j) {
    const double t = std::ldexp(1.0, -j);
    ec.times.push_back(t);
    ec.values.push_back(law(t, j));
  }
  return ec;
}

} // namespace

TEST_CASE("error curves")
{
  const FrequencyGrid g(1, 64.0, 2048);
  const auto sym = Symbol::elliptic(1);
  const std::vector<std::vector<double>> bases{{-0.5}, {0.0}, {0.8}};
  const auto times = dyadic_times(3, 8);
  CHECK(times.front() == 0.125);
  CHECK(times.size() == 6);

  const auto zero = error_curve(make_zero(g), sym, Curve::shift({1.0}, 0.5), bases, times);
  for (double v : zero.values)
    CHECK(v == 0.0);

  const auto f = make_gaussian(g, 1.0);
  const auto ec = error_curve(f, sym, Curve::shift({1.0}, 0.5), bases, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double ss = 0.0;
    for (const auto& x : bases)
      ss += std::norm(gaussian_oracle(x[0] - std::sqrt(times[i]), times[i]) - gaussian_oracle(x[0], 0.0));
    CHECK(std::abs(ec.values[i] - std::sqrt(ss / 3.0)) < 1e-6);
  }

  const auto b = make_band_limited_random(g, 4.0, 2);
  double l1p = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    l1p += g.weight(k) * std::abs(b[k]) * std::abs(sym(g.point(k)));
  const auto small = dyadic_times(8, 12);
  const auto vec = error_curve(b, sym, Curve::vertical(1), bases, small);
  for (std::size_t i = 0; i < small.size(); ++i)
    CHECK(vec.values[i] <= small[i] * l1p);

  const std::vector<double> increasing{0.01, 0.1};
  CHECK_THROWS_AS(error_curve(f, sym, Curve::vertical(1), bases, increasing), InvalidArgument);
}

TEST_CASE("rate fits")
{
  const auto exact = synthetic([](double t, int) { return std::pow(t, 0.7); });
  CHECK(std::abs(fit_rate(exact).theta - 0.7) < 1e-10);
  const auto flat = synthetic([](double, int) { return 2.5; });
  CHECK(std::abs(fit_rate(flat).theta) < 1e-10);
  const auto noisy = synthetic([](double t, int j) {
    const CounterRng rng(5, 0);
    return 3.0 * std::pow(t, 1.2) * (1.0 + 0.01 * (2.0 * rng.uniform(static_cast<std::uint64_t>(j)) - 1.0));
  });
  const double th = fit_rate(noisy).theta;
  CHECK(th >= 1.15);
  CHECK(th <= 1.25);

  const auto w = time_window(exact, std::ldexp(1.0, -10), std::ldexp(1.0, -5));
  CHECK(w.end - w.begin == 6);
  CHECK(std::abs(fit_rate(exact, w).theta - 0.7) < 1e-10);

  auto floor = exact;
  floor.values[6] = 1e-15;
  CHECK_THROWS_AS(fit_rate(floor), NoiseFloorError);
  try {
    fit_rate(floor);
  } catch (const NoiseFloorError& e) {
    CHECK(e.offending_time() == floor.times[6]);
  }
  CHECK_THROWS_AS(fit_rate(exact, FitWindow{0, 3}), InvalidArgument);
}

TEST_CASE("predicted rates")
{
  CHECK(predicted_rate(1.0, 1.0, 2.0) == 0.5);
  CHECK(predicted_rate(0.5, 0.0, 2.0) == 0.0);
  CHECK(predicted_rate_polynomial2d(2, 3, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(predicted_rate(0.5, 2.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(predicted_rate_polynomial2d(2, 3, 3.0), InvalidArgument);
}

TEST_CASE("maximal estimates")
{
  const FrequencyGrid g(1, 16.0, 257);
  std::vector<cplx> v(g.size(), 0.0);
  v[200] = 1.0;
  const SpectralField spike(g, v);
  const auto sym = Symbol::elliptic(1);
  const Ball ball{{0.0}, 1.0};
  const auto tg = maximal_time_grid(64);
  CHECK(tg.size() >= 64);
  const auto est = maximal_lp(spike, sym, Curve::shift({1.0}, 0.5), ball, 2.0, tg);
  CHECK(est.value == doctest::Approx(g.axis_weight(200) * std::sqrt(2.0)).epsilon(1e-12));

  const auto f = make_band_limited_random(g, 4.0, 3);
  const auto coarse = maximal_lp(f, sym, Curve::vertical(1), ball, 2.0, maximal_time_grid(64));
  const auto fine = maximal_lp(f, sym, Curve::vertical(1), ball, 2.0, maximal_time_grid(128, 4.0));
  CHECK(fine.value >= coarse.value * (1.0 - 1e-12));
  for (double n : coarse.fixed_time_norms)
    CHECK(coarse.value >= n);
  const std::vector<double> t0{0.0, 0.5};
  const auto with0 = maximal_lp(f, sym, Curve::vertical(1), ball, 2.0, t0);
  CHECK(with0.value >= with0.fixed_time_norms[0]);
  CHECK(coarse.value >= with0.fixed_time_norms[0] * 0.99);

  const auto tiles = maximal_time_grid(64, 8.0, 2);
  CHECK(std::count_if(tiles.begin(), tiles.end(), [](double t) { return t == 0.125; }) == 1);
  CHECK_THROWS_AS(maximal_time_grid(16), InvalidArgument);
}

TEST_CASE("sweep slope")
{
  const std::vector<double> lambdas{8, 16, 32};
  const std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK(std::abs(sweep_slope(lambdas, flat)) < 1e-12);
  const std::vector<double> r{1.0, 1.3, 1.9};
  const std::vector<double> r2{2.0, 2.6, 3.8};
  CHECK(sweep_slope(lambdas, r) == doctest::Approx(sweep_slope(lambdas, r2)).epsilon(1e-12));
}

TEST_CASE("exponent sweep is deterministic")
{
  const FrequencyGrid g(1, 32.0, 256);
  const std::vector<double> lambdas{2, 4, 8};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
  SweepOptions opt;
  opt.space_points = 16;
  const auto a = exponent_sweep(g, Symbol::elliptic(1), Curve::vertical(1), lambdas, seeds, opt);
  const auto b = exponent_sweep(g, Symbol::elliptic(1), Curve::vertical(1), lambdas, seeds, opt);
  CHECK(a.slope == b.slope);
  REQUIRE(a.samples.size() == 24);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i].ratio == b.samples[i].ratio);
  const std::vector<double> short_list{2, 4};
  CHECK_THROWS_AS(exponent_sweep(g, Symbol::elliptic(1), Curve::vertical(1), short_list, seeds, opt),
                  InvalidArgument);
  seeds.resize(4);
  CHECK_THROWS_AS(exponent_sweep(g, Symbol::elliptic(1), Curve::vertical(1), lambdas, seeds, opt), InvalidArgument);
}

TEST_CASE("lower bound check")
{
  const FrequencyGrid g(1, 64.0, 2048);
  const auto f = make_gaussian(g, 1.0);
  const auto bases = sample_ball(Ball{{0.0}, 1.0}, 16, 0);
  for (double alpha : {0.5, 1.0}) {
    const auto r = lower_bound_check(f, Symbol::elliptic(1), alpha, bases);
    CHECK(r.floor > 0.0);
    CHECK(r.passed);
    CHECK(r.liminf_ratio >= 0.9 * r.floor);
  }
  CHECK_THROWS_AS(lower_bound_check(make_zero(g), Symbol::elliptic(1), 0.5, bases), InvalidArgument);
}

TEST_CASE("rate saturates at alpha for smooth data")
{
  const FrequencyGrid g(1, 64.0, 2048);
  const auto f = make_gaussian(g, 1.0);
  const auto bases = sample_ball(Ball{{0.0}, 1.0}, 8, 0);
  const auto times = dyadic_times(3, 12);
  for (double alpha : {0.25, 0.5}) {
    const auto ec = error_curve(f, Symbol::elliptic(1), Curve::shift({1.0}, alpha), bases, times);
    CHECK(fit_rate(ec).theta <= alpha + 0.1);
  }
}

TEST_CASE("graded data")
{
  const FrequencyGrid g(1, 64.0, 2048);
  const auto f = make_graded_data(g, 0.0, 1.0, 3, 1, 4);
  CHECK_FALSE(f.band());
  // piece k has weight 2^{-k}; only neighbouring annuli overlap
  double w2 = 0.0;
  for (int k = 1; k <= 4; ++k)
    w2 += std::exp2(-2.0 * k);
  const double e = std::pow(spectral_l2_norm(f), 2);
  CHECK(e > 0.3 * w2);
  CHECK(e < 3.0 * w2);
  CHECK(make_graded_data(g, 0.0, 1.0, 3, 1, 4) == f);
  CHECK_THROWS_AS(make_graded_data(g, 0.0, 1.0, 3, 4, 1), InvalidArgument);
}

TEST_CASE("rate ordering in delta")
{
  const FrequencyGrid g(1, 128.0, 4097);
  const auto sym = Symbol::elliptic(1);
  const auto curve = Curve::shift({1.0}, 0.5);
  const auto bases = sample_ball(Ball{{0.0}, 1.0}, 8, 0);
  const auto times = dyadic_times(5, 12);
  double prev = -1.0;
  for (double delta : {0.0, 0.5, 1.0, 1.5}) {
    const auto f = make_graded_data(g, 0.0, delta, 7, 0, 6);
    const double th = fit_rate(error_curve(f, sym, curve, bases, times)).theta;
    CHECK(th >= prev - 0.1);
    prev = th;
  }
}

TEST_CASE("small-time check")
{
  const FrequencyGrid g(1, 64.0, 2048);
  const auto f = make_band_limited_random(g, 8.0, 4);
  const auto bases = sample_ball(Ball{{0.0}, 1.0}, 10, 1);
  std::vector<double> times;
  for (int j = 0; j < 10; ++j)
    times.push_back(std::pow(8.0, -4.0) * (1.0 - 0.09 * j));
  const auto c = small_time_check(f, Symbol::elliptic(1), Curve::shift({1.0}, 0.5), bases, times);
  CHECK(c.samples == 100);
  CHECK(c.violations == 0);
  CHECK(c.worst_ratio <= 1.0);
}
