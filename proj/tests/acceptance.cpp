#include "curveprop/decomp.hpp"
#include "curveprop/experiments.hpp"
#include "curveprop/propagator.hpp"
#include "curveprop/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

using namespace curveprop;

namespace {

struct Verdict
{
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

cplx gaussian_oracle(double x, double t)
{
  const cplx a(1.0, -t);
  return std::sqrt(std::acos(-1.0) / a) * std::exp(-x * x / (4.0 * a));
}

Verdict gaussian_oracle_check()
{
  const FrequencyGrid g(1, 64.0, 2048);
  const auto f = make_gaussian(g, 1.0);
  const auto sym = Symbol::elliptic(1);
  const CounterRng rng(2024, 1);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 32; ++i) {
    const double x = -5.0 + 10.0 * rng.uniform(2 * i);
    const double t = rng.uniform(2 * i + 1);
    const cplx want = gaussian_oracle(x, t);
    const std::vector<double> p{x};
    worst = std::max(worst, std::abs(evolve_at(f, sym, p, t) - want) / std::abs(want));
  }
  return {worst <= 1e-6, fmt("max relative error %.3e over 32 (x,t)", worst)};
}

Verdict conservation_check()
{
  double drift = 0.0;
  bool identical = true;
  const FrequencyGrid g1(1, 64.0, 2048);
  const FrequencyGrid g2(2, 64.0, 256);
  const std::vector<std::pair<SpectralField, Symbol>> cases{
      {make_gaussian(g1, 1.0), Symbol::elliptic(1)},
      {make_band_limited_random(g1, 16.0, 5), Symbol::fractional(1, 1.5)},
      {make_band_limited_random(g2, 8.0, 6), Symbol::polynomial2d(2, 3, 1)},
      {make_gaussian(g2, 2.0), Symbol::nonelliptic(2)}};
  for (const auto& [f, sym] : cases) {
    const double base = spectral_l2_norm(f);
    for (double t : {1e-3, 0.1, 0.5, 1.0})
      drift = std::max(drift, std::abs(spectral_l2_norm(evolve_field(f, sym, t)) - base));
    const auto pts = sample_ball(Ball{std::vector<double>(static_cast<std::size_t>(f.dimension()), 0.0), 3.0}, 8, 2);
    for (const auto& x : pts)
      identical = identical && evolve_at(f, sym, x, 0.0) == point_eval(f, x);
  }
  return {drift <= 1e-12 && identical,
          fmt("max L2 drift %.3e, t=0 bit-identical: ", drift) + (identical ? "yes" : "no")};
}

Verdict fast_path_check()
{
  double worst = 0.0;
  Symbol::ExponentTable t1, t2;
  t1[{3}] = 0.5;
  t1[{2}] = -1.0;
  t2[{2, 1}] = 0.25;
  t2[{0, 2}] = 1.0;
  const FrequencyGrid g1(1, 64.0, 2048);
  const FrequencyGrid g2(2, 32.0, 64);
  const std::vector<std::pair<const FrequencyGrid*, Symbol>> cases{
      {&g1, Symbol::elliptic(1)},         {&g1, Symbol::fractional(1, 1.5)}, {&g1, Symbol::polynomial(1, t1)},
      {&g2, Symbol::elliptic(2)},         {&g2, Symbol::nonelliptic(2)},     {&g2, Symbol::fractional(2, 3.0)},
      {&g2, Symbol::polynomial2d(2, 3, 1)}, {&g2, Symbol::polynomial2d(2, 2, -1)}, {&g2, Symbol::polynomial(2, t2)}};
  for (const auto& [g, sym] : cases) {
    const int n = g->dimension();
    const auto f = make_band_limited_random(*g, 4.0, 31);
    const int m = n == 1 ? 4096 : 128;
    const auto xs = dual_spatial_grid(*g, m, std::vector<double>(static_cast<std::size_t>(n), -2.0), n == 1 ? 256 : 24);
    for (double t : {0.05, 0.5}) {
      const auto fast = evolve_uniform_fast(f, sym, xs, t);
      double scale = 0.0, err = 0.0;
      for (std::size_t j = 0; j < fast.size(); j += 7) {
        const cplx d = evolve_at(f, sym, xs.point(j), t);
        scale = std::max(scale, std::abs(d));
        err = std::max(err, std::abs(fast[j] - d));
      }
      worst = std::max(worst, err / scale);
    }
  }
  return {worst <= 1e-9, fmt("max relative deviation %.3e over 9 symbols in n=1,2", worst)};
}

Verdict rate_fit_check()
{
  const FrequencyGrid g(1, 512.0, 16385);
  const auto sym = Symbol::elliptic(1);
  const double alpha = 0.5;
  const auto curve = Curve::shift({1.0}, alpha);
  const auto bases = sample_ball(Ball{{0.0}, 1.0}, 16, 0);
  const auto times = dyadic_times(3, 12);
  bool pass = true;
  std::string detail;
  for (double delta : {0.0, 0.5, 1.0}) {
    const auto f = make_graded_data(g, 0.0, delta, 1, 0, 8);
    const auto ec = error_curve(f, sym, curve, bases, times);
    const auto fit = fit_rate(ec, time_window(ec, std::ldexp(1.0, -12), std::ldexp(1.0, -5)));
    const double target = std::min(predicted_rate(alpha, delta, 2.0), alpha);
    pass = pass && std::abs(fit.theta - target) <= 0.1;
    detail += fmt("delta=%.1f theta=%.3f target=%.3f; ", delta, fit.theta, target);
  }
  return {pass, detail};
}

Verdict lower_bound_acceptance()
{
  const FrequencyGrid g(1, 64.0, 2048);
  const auto f = make_gaussian(g, 1.0);
  const auto bases = sample_ball(Ball{{0.0}, 1.0}, 16, 0);
  bool pass = true;
  std::string detail;
  for (double alpha : {0.5, 1.0}) {
    const auto r = lower_bound_check(f, Symbol::elliptic(1), alpha, bases);
    pass = pass && r.floor > 0.0 && r.liminf_ratio >= 0.9 * r.floor;
    detail += fmt("alpha=%.1f liminf=%.4f floor=%.4f; ", alpha, r.liminf_ratio, r.floor);
  }
  return {pass, detail};
}

Verdict lattice_check()
{
  const FrequencyGrid g(1, 64.0, 2048);
  const auto sym = Symbol::elliptic(1);
  const Ball ball{{0.0}, 1.0};
  const double alpha = 0.5;
  const auto curve = Curve::shift({1.0}, alpha);
  std::size_t samples = 0, violations = 0;
  double worst = 0.0;
  for (double lambda : {8.0, 16.0}) {
    const auto cal = calibrate_lattice(curve, lambda, ball);
    const auto f = make_band_limited_random(g, lambda, 40);
    const double t_max = std::pow(lambda, -1.0 / alpha);
    const auto xs = sample_ball(ball, 100, 77);
    const CounterRng rng(91, static_cast<std::uint64_t>(lambda));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double t = t_max * (1e-3 + (1.0 - 2e-3) * rng.uniform(i));
      const auto b = lattice_translate_bound(f, sym, curve, xs[i], t, cal);
      ++samples;
      if (b.lhs > b.rhs)
        ++violations;
      worst = std::max(worst, b.lhs / b.rhs);
    }
  }
  return {violations == 0,
          fmt("%.0f samples, %.0f violations, max lhs/rhs %.3f", static_cast<double>(samples),
              static_cast<double>(violations), worst)};
}

Verdict decomposition_check()
{
  double recon = 0.0;
  const FrequencyGrid g1(1, 64.0, 2048);
  const FrequencyGrid g2(2, 64.0, 256);
  for (const auto& f : {make_band_limited_random(g1, 8.0, 1), make_gaussian(g1, 3.0), make_gaussian(g2, 4.0),
                        make_band_limited_random(g2, 16.0, 2)}) {
    const auto pieces = dyadic_decompose(f);
    for (std::size_t k = 0; k < f.grid().size(); ++k) {
      cplx s = 0.0;
      for (const auto& p : pieces)
        s += p.field[k];
      recon = std::max(recon, std::abs(s - f[k]));
    }
  }
  const auto aniso = make_band_limited_random(g2, 16.0, 3);
  const auto dec = anisotropic_decompose(aniso, 2, 3);
  for (std::size_t k = 0; k < g2.size(); ++k) {
    cplx s = 0.0;
    for (const auto& p : dec.pieces)
      s += p.field[k];
    recon = std::max(recon, std::abs(s - aniso[k]));
  }

  const auto count64 = anisotropic_tiling(64.0, 2, 3).active.size();
  bool growth_ok = true;
  std::size_t prev = anisotropic_tiling(8.0, 2, 3).active.size();
  for (double lambda : {16.0, 32.0, 64.0, 128.0, 256.0}) {
    const auto now = anisotropic_tiling(lambda, 2, 3).active.size();
    growth_ok = growth_ok && now <= prev + 2;
    prev = now;
  }

  bool tiling_ok = true;
  for (auto [lambda, m1] : {std::pair{16.0, 2}, std::pair{10.0, 2}, std::pair{4.0, 3}, std::pair{64.0, 2}}) {
    const auto tl = time_intervals(lambda, m1);
    const double len = std::pow(lambda, 1.0 - m1);
    tiling_ok = tiling_ok && tl.length == len;
    for (const auto& iv : tl.intervals)
      tiling_ok = tiling_ok && iv.end - iv.start <= len * (1.0 + 1e-15);
    for (int j = 0; j <= 4096; ++j) {
      const int c = tl.coverage(j / 4096.0);
      tiling_ok = tiling_ok && c >= 1 && c <= 2;
    }
  }
  const bool pass = recon <= 1e-12 && count64 >= 3 && count64 <= 5 && growth_ok && tiling_ok;
  return {pass, fmt("reconstruction %.3e, active tiles at 2^6: %.0f, growth ok: %.0f, time tiling ok: %.0f", recon,
                    static_cast<double>(count64), growth_ok, tiling_ok)};
}

Verdict kernel_check()
{
  const std::vector<double> o{0.0, 0.0};
  const std::vector<double> seps{6.25, 12.5, 25.0, 50.0};
  bool pass = true;
  std::string detail;
  for (int m2 : {2, 3}) {
    KernelParams p;
    p.m2 = m2;
    const auto fit = kernel_decay_fit(p, Curve::vertical(2), o, o, seps);
    const double ratio = fit.samples.back().abs_k / fit.samples.front().abs_k;
    pass = pass && !fit.underflow && fit.slope <= -1.0 && ratio <= 0.25;
    detail += fmt("(2,%.0f) slope=%.3f last/first=%.2e; ", m2, fit.slope, ratio);
  }
  return {pass, detail};
}

Verdict sweep_check()
{
  const FrequencyGrid g(1, 64.0, 2048);
  const std::vector<double> lambdas{8, 16, 32};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 8; ++s)
    seeds.push_back(s);
  const SweepOptions opt;
  const auto a = exponent_sweep(g, Symbol::elliptic(1), Curve::vertical(1), lambdas, seeds, opt);
  const auto b = exponent_sweep(g, Symbol::elliptic(1), Curve::vertical(1), lambdas, seeds, opt);
  bool same = a.slope == b.slope && a.samples.size() == b.samples.size();
  for (std::size_t i = 0; same && i < a.samples.size(); ++i)
    same = a.samples[i].ratio == b.samples[i].ratio;
  return {a.slope <= 0.75 && same, fmt("slope %.4f, deterministic: ", a.slope) + (same ? "yes" : "no")};
}

Verdict small_time_acceptance()
{
  const FrequencyGrid g(1, 64.0, 2048);
  const auto sym = Symbol::elliptic(1);
  const double lambda = 8.0, alpha = 0.5, m = 2.0;
  const auto f = make_band_limited_random(g, lambda, 13);
  const auto bases = sample_ball(Ball{{0.0}, 2.0}, 100, 5);
  const double t_max = std::pow(lambda, -m / alpha);
  std::vector<double> times;
  for (int j = 0; j < 10; ++j)
    times.push_back(t_max * std::pow(0.5, j) * 0.999);
  const auto c = small_time_check(f, sym, Curve::shift({1.0}, alpha), bases, times);
  return {c.violations == 0 && c.samples == 1000,
          fmt("%.0f samples, %.0f violations, worst E/bound %.3f", static_cast<double>(c.samples),
              static_cast<double>(c.violations), c.worst_ratio)};
}

const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
    {"gaussian oracle", gaussian_oracle_check},
    {"conservation and identity", conservation_check},
    {"fast-path equivalence", fast_path_check},
    {"rate fit against min(alpha delta/m, alpha)", rate_fit_check},
    {"lower bound along x - e1 t^alpha", lower_bound_acceptance},
    {"lattice translate inequality", lattice_check},
    {"decomposition suite", decomposition_check},
    {"kernel decay", kernel_check},
    {"exponent sweep", sweep_check},
    {"small-time bounds", small_time_acceptance},
};

bool report(std::size_t i)
{
  Verdict v;
  try {
    v = criteria[i].second();
  } catch (const std::exception& e) {
    v = {false, std::string("threw: ") + e.what()};
  }
  std::printf("criterion %2zu %s: %s (%s)\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
              v.detail.c_str());
  std::fflush(stdout);
  return v.pass;
}

} // namespace

int main(int argc, char** argv)
{
  bool ok = true;
  if (argc > 1) {
    for (int a = 1; a < argc; ++a) {
      const int k = std::atoi(argv[a]);
      if (k < 1 || k > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "unknown criterion %s\n", argv[a]);
        return 2;
      }
      ok = report(static_cast<std::size_t>(k - 1)) && ok;
    }
  } else {
    for (std::size_t i = 0; i < criteria.size(); ++i)
      ok = report(i) && ok;
  }
  return ok ? 0 : 1;
}
