#include "curveprop/decomp.hpp"
#include "curveprop/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace curveprop;

namespace {

double reconstruction_error(const SpectralField& f, const std::vector<SpectralField>& parts)
{
  double worst = 0.0;
  for (std::size_t k = 0; k < f.grid().size(); ++k) {
    cplx s = 0.0;
    for (const auto& p : parts)
      s += p[k];
    worst = std::max(worst, std::abs(s - f[k]));
  }
  return worst;
}

} // namespace

TEST_CASE("filter bank partition of unity")
{
  const FrequencyGrid g(2, 64.0, 256);
  const auto bank = FilterBank::covering(g);
  for (double r = 0.0; r <= 32.0 * std::sqrt(2.0); r += 0.01) {
    double s = 0.0, sq = 0.0;
    for (double v : bank.values(r)) {
      CHECK(v >= 0.0);
      s += v;
      sq += v * v;
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
    CHECK(sq >= 0.5 - 1e-12);
    CHECK(sq <= 1.0 + 1e-12);
  }
  CHECK(bank(0, 2.0) == 0.0);
  CHECK(bank(3, 4.0) == 0.0);
  CHECK(bank(3, 16.0) == 0.0);
  CHECK(bank(3, 8.0) == doctest::Approx(1.0));
}

TEST_CASE("dyadic decomposition")
{
  const FrequencyGrid g(1, 64.0, 2048);
  const auto f = make_band_limited_random(g, 8.0, 1);
  const auto pieces = dyadic_decompose(f);
  std::vector<SpectralField> parts;
  for (const auto& p : pieces) {
    const bool nonzero = spectral_max(p.field) > 0.0;
    CHECK(nonzero == (p.k >= 2 && p.k <= 4));
    if (p.k >= 1) {
      REQUIRE(p.field.band());
      CHECK(*p.field.band() == std::ldexp(1.0, p.k));
    }
    parts.push_back(p.field);
  }
  CHECK(reconstruction_error(f, parts) <= 1e-12);

  const auto e = std::pow(spectral_l2_norm(f), 2);
  double sum = 0.0;
  for (const auto& p : pieces)
    sum += std::pow(spectral_l2_norm(p.field), 2);
  CHECK(sum >= 0.5 * e);
  CHECK(sum <= 3.0 * e);

  const auto z = dyadic_decompose(make_zero(g));
  for (const auto& p : z)
    CHECK(spectral_max(p.field) == 0.0);

  const FrequencyGrid g2(2, 64.0, 256);
  const auto gauss = make_gaussian(g2, 4.0);
  parts.clear();
  for (const auto& p : dyadic_decompose(gauss))
    parts.push_back(p.field);
  CHECK(reconstruction_error(gauss, parts) <= 1e-12);
}

TEST_CASE("anisotropic tiling")
{
  const auto t64 = anisotropic_tiling(64.0, 2, 3);
  CHECK(!t64.active.empty());
  for (int k : t64.active) {
    CHECK(k >= 3);
    CHECK(k <= 7);
  }
  CHECK(t64.active.size() >= 3);
  CHECK(t64.active.size() <= 5);
  CHECK(t64.active == std::vector<int>{4, 5, 6});

  const auto iso = anisotropic_tiling(32.0, 2, 2);
  CHECK(iso.active == std::vector<int>{5});

  std::size_t prev = anisotropic_tiling(8.0, 2, 3).active.size();
  for (double lambda : {16.0, 32.0, 64.0, 128.0}) {
    const auto now = anisotropic_tiling(lambda, 2, 3).active.size();
    CHECK(now <= prev + 2);
    prev = now;
  }
  const std::vector<double> xi{8.0, 4.0};
  CHECK(anisotropic_rho(2, 2, 2, xi) == 3.0);
}

TEST_CASE("anisotropic decomposition")
{
  const FrequencyGrid g(2, 64.0, 256);
  for (auto [m1, m2] : {std::pair{2, 3}, std::pair{2, 2}, std::pair{3, 4}}) {
    const auto f = make_band_limited_random(g, 16.0, 21);
    const auto dec = anisotropic_decompose(f, m1, m2);
    std::vector<SpectralField> parts;
    for (const auto& p : dec.pieces)
      parts.push_back(p.field);
    CHECK(reconstruction_error(f, parts) <= 1e-12);
  }
  CHECK_THROWS_AS(anisotropic_decompose(make_gaussian(g, 1.0), 2, 3), InvalidArgument);
  const FrequencyGrid g1(1, 64.0, 512);
  CHECK_THROWS_AS(anisotropic_decompose(make_band_limited_random(g1, 8.0, 1), 2, 3), UnsupportedDimension);
}

TEST_CASE("time tiling")
{
  const auto a = time_intervals(2.0, 2);
  CHECK(a.intervals.size() == 2);
  CHECK(a.length == 0.5);
  const auto b = time_intervals(16.0, 2);
  CHECK(b.intervals.size() == 16);
  CHECK(b.length == 1.0 / 16.0);
  const auto c = time_intervals(4.0, 3);
  CHECK(c.intervals.size() == 16);
  CHECK(c.length == 1.0 / 16.0);

  for (const auto& tl : {time_intervals(3.0, 2), time_intervals(10.0, 2), time_intervals(5.0, 3)}) {
    double covered = 0.0;
    for (std::size_t i = 0; i < tl.intervals.size(); ++i) {
      const auto& iv = tl.intervals[i];
      covered += iv.end - iv.start;
      if (i > 0)
        covered -= std::max(0.0, tl.intervals[i - 1].end - iv.start);
      CHECK(iv.end - iv.start <= tl.length + 1e-15);
    }
    CHECK(std::abs(covered - 1.0) < 1e-12);
    for (int j = 0; j <= 1000; ++j) {
      const int cov = tl.coverage(j / 1000.0);
      CHECK(cov >= 1);
      CHECK(cov <= 2);
    }
    CHECK(tl.intervals.back().closed);
    CHECK(tl.intervals.back().end == 1.0);
  }
  CHECK_THROWS_AS(time_intervals(16.0, 1), InvalidArgument);
  CHECK_THROWS_AS(time_intervals(0.5, 2), InvalidArgument);
}

TEST_CASE("kernel values")
{
  KernelParams p;
  const std::vector<double> o{0.0, 0.0};
  const auto vert = Curve::vertical(2);
  const auto diag = kernel_eval(p, vert, o, o, 0.3, 0.3);
  CHECK(!diag.empty_support);
  CHECK(diag.value.real() > 0.0);
  CHECK(std::abs(diag.value.imag()) <= 1e-12 * diag.value.real());

  const std::vector<double> x{0.1, -0.2}, y{0.05, 0.3};
  const auto k1 = kernel_eval(p, vert, x, y, 0.4, 0.1);
  const auto k2 = kernel_eval(p, vert, y, x, 0.1, 0.4);
  CHECK(std::abs(k1.value - std::conj(k2.value)) <= 1e-12 * diag.value.real());
  CHECK(std::abs(k1.value) <= diag.value.real() * (1.0 + 1e-12));

  CHECK(kernel_bump(0.1, 0.1) == 0.0);
  CHECK(kernel_bump(2.0, 0.0) == 0.0);
  CHECK(kernel_bump(1.0, 0.5) > 0.0);

  KernelParams far = p;
  far.k = 12;
  CHECK(kernel_eval(far, vert, o, o, 0.0, 0.0).empty_support);
}

TEST_CASE("kernel decay")
{
  KernelParams p;
  const std::vector<double> o{0.0, 0.0};
  const std::vector<double> seps{6.25, 12.5, 25.0, 50.0};
  const auto fit = kernel_decay_fit(p, Curve::vertical(2), o, o, seps);
  CHECK_FALSE(fit.underflow);
  CHECK(fit.slope <= -1.0);
  REQUIRE(fit.samples.size() == 4);
  CHECK(fit.samples.back().abs_k * 4.0 <= fit.samples.front().abs_k);
  for (std::size_t i = 1; i < fit.samples.size(); ++i)
    CHECK(fit.samples[i].abs_k <= 2.0 * fit.samples[i - 1].abs_k);

  const std::vector<double> near{1.0, 2.0, 4.0, 8.0};
  CHECK_THROWS_AS(kernel_decay_fit(p, Curve::vertical(2), o, o, near), PreconditionViolation);
  const std::vector<double> narrow{6.25, 12.5};
  CHECK_THROWS_AS(kernel_decay_fit(p, Curve::vertical(2), o, o, narrow), PreconditionViolation);
}
