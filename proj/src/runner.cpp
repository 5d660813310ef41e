#include "curveprop/runner.hpp"

#include "curveprop/decomp.hpp"
#include "curveprop/errors.hpp"
#include "curveprop/experiments.hpp"
#include "curveprop/propagator.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

namespace curveprop {

using nlohmann::json;

namespace {

std::string param_path(const std::string& key) { return "params." + key; }

double param_number(const json& params, const std::string& key, double fallback)
{
  const auto it = params.find(key);
  if (it == params.end())
    return fallback;
  if (!it->is_number() || !std::isfinite(it->get<double>()))
    throw ValidationError(param_path(key), "expected a finite number");
  return it->get<double>();
}

int param_int(const json& params, const std::string& key, int fallback)
{
  const auto it = params.find(key);
  if (it == params.end())
    return fallback;
  if (!it->is_number_integer())
    throw ValidationError(param_path(key), "expected an integer");
  return it->get<int>();
}

std::vector<double> numbers(const json& j, const std::string& path)
{
  if (!j.is_array())
    throw ValidationError(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number() || !std::isfinite(j[i].get<double>()))
      throw ValidationError(path + "[" + std::to_string(i) + "]", "expected a finite number");
    v.push_back(j[i].get<double>());
  }
  return v;
}

std::vector<double> param_vector(const json& params, const std::string& key, std::vector<double> fallback)
{
  const auto it = params.find(key);
  return it == params.end() ? fallback : numbers(*it, param_path(key));
}

std::vector<double> param_point(const json& params, const std::string& key, int n)
{
  auto v = param_vector(params, key, std::vector<double>(static_cast<std::size_t>(n), 0.0));
  if (static_cast<int>(v.size()) != n)
    throw ValidationError(param_path(key), "length must equal the dimension " + std::to_string(n));
  return v;
}

Ball param_ball(const json& params, int n)
{
  Ball b{std::vector<double>(static_cast<std::size_t>(n), 0.0), 1.0};
  const auto it = params.find("ball");
  if (it == params.end())
    return b;
  if (!it->is_object())
    throw ValidationError("params.ball", "expected an object");
  b.center = param_point(*it, "center", n);
  b.radius = param_number(*it, "radius", 1.0);
  if (!(b.radius > 0.0))
    throw ValidationError("params.ball.radius", "must be positive");
  return b;
}

/// Explicit `points` list or seeded samples in the ball.
std::vector<std::vector<double>> param_bases(const json& params, int n, const Ball& ball, int default_count,
                                             std::uint64_t seed)
{
  const auto it = params.find("points");
  if (it == params.end()) {
    const int count = param_int(params, "point_count", default_count);
    if (count < 1)
      throw ValidationError("params.point_count", "must be positive");
    return sample_ball(ball, count, seed);
  }
  if (!it->is_array() || it->empty())
    throw ValidationError("params.points", "expected a non-empty array of points");
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto p = "params.points[" + std::to_string(i) + "]";
    auto x = (*it)[i].is_number() ? std::vector<double>{(*it)[i].get<double>()} : numbers((*it)[i], p);
    if (static_cast<int>(x.size()) != n)
      throw ValidationError(p, "length must equal the dimension " + std::to_string(n));
    pts.push_back(std::move(x));
  }
  return pts;
}

CurveMethod param_method(const json& params)
{
  const auto it = params.find("method");
  if (it == params.end())
    return CurveMethod::direct;
  if (it->is_string()) {
    for (auto m : {CurveMethod::direct, CurveMethod::interpolated})
      if (it->get<std::string>() == to_string(m))
        return m;
  }
  throw ValidationError("params.method", "expected \"direct\" or \"interpolated\"");
}

std::uint64_t data_seed(const ExperimentConfig& c) { return c.data ? c.data->seed : 0; }

std::vector<std::string> coordinate_header(int n)
{
  if (n == 1)
    return {"x"};
  std::vector<std::string> h;
  for (int a = 1; a <= n; ++a)
    h.push_back("x" + std::to_string(a));
  return h;
}

ResultEntry run_propagate(const ExperimentConfig& c, const SpectralField& field)
{
  const int n = c.symbol.dimension();
  const auto& p = c.params;
  const auto times = param_vector(p, "times", {0.0, 0.125, 0.25, 0.5, 1.0});
  for (std::size_t i = 0; i < times.size(); ++i)
    if (!(times[i] >= 0.0 && times[i] <= 1.0))
      throw ValidationError("params.times[" + std::to_string(i) + "]", "times must lie in [0, 1]");

  CsvTable table{"propagate.csv", coordinate_header(n), {}, {}};
  table.header.insert(table.header.end(), {"t", "re", "im"});
  json scalars{{"times", times.size()}};

  const std::string mode = p.value("mode", std::string("points"));
  if (mode == "fast") {
    if (!c.curve.time_independent())
      throw ValidationError("params.mode", "the fast grid path needs a vertical curve");
    int transform = 1;
    while (transform < c.grid.points)
      transform *= 2;
    transform = param_int(p, "transform_size", transform);
    const int count = param_int(p, "count", std::min(64, transform));
    if (count < 1)
      throw ValidationError("params.count", "must be positive");
    const double dx = 2.0 * std::acos(-1.0) / (transform * field.grid().spacing());
    auto origin = param_point(p, "origin", n);
    if (!p.contains("origin"))
      for (auto& o : origin)
        o = -dx * (count / 2);
    const auto xs = [&] {
      try {
        return dual_spatial_grid(field.grid(), transform, origin, count);
      } catch (const InvalidArgument& e) {
        throw ValidationError("params.transform_size", e.what());
      }
    }();
    for (double t : times) {
      const auto vals = evolve_uniform_fast(field, c.symbol, xs, t);
      for (std::size_t j = 0; j < vals.size(); ++j) {
        auto row = xs.point(j);
        row.insert(row.end(), {t, vals[j].real(), vals[j].imag()});
        table.rows.push_back(std::move(row));
      }
    }
    scalars["mode"] = "fast";
    scalars["spatial_spacing"] = xs.spacing;
    scalars["spatial_count"] = count;
  } else if (mode == "points") {
    const Ball ball{std::vector<double>(static_cast<std::size_t>(n), 0.0), 4.0};
    std::vector<std::vector<double>> bases;
    if (p.contains("points") || p.contains("point_count")) {
      bases = param_bases(p, n, ball, 16, data_seed(c));
    } else {
      for (int i = 0; i <= 16; ++i) {
        std::vector<double> x(static_cast<std::size_t>(n), 0.0);
        x[0] = -4.0 + 0.5 * i;
        bases.push_back(std::move(x));
      }
    }
    const auto method = param_method(p);
    std::string used = to_string(method);
    for (double t : times) {
      const auto ev = evolve_along_curve(field, c.symbol, c.curve, bases, t, method);
      if (ev.method != method)
        used = to_string(ev.method);
      for (std::size_t j = 0; j < bases.size(); ++j) {
        auto row = bases[j];
        row.insert(row.end(), {t, ev.values[j].real(), ev.values[j].imag()});
        table.rows.push_back(std::move(row));
      }
    }
    scalars["mode"] = "points";
    scalars["method"] = used;
    scalars["points"] = bases.size();
  } else {
    throw ValidationError("params.mode", "expected \"points\" or \"fast\"");
  }
  scalars["l2_norm"] = spectral_l2_norm(field);
  return {"propagate", scalars, std::move(table)};
}

ResultEntry run_rate_fit(const ExperimentConfig& c, const SpectralField& field)
{
  const int n = c.symbol.dimension();
  const auto& p = c.params;
  const int j_min = param_int(p, "j_min", 3);
  const int j_max = param_int(p, "j_max", 12);
  if (j_min < 0 || j_max < j_min + 3)
    throw ValidationError("params.j_max", "need 0 <= j_min and j_max >= j_min + 3");
  const double fit_min = param_number(p, "fit_min", std::ldexp(1.0, -12));
  const double fit_max = param_number(p, "fit_max", std::ldexp(1.0, -5));
  if (!(fit_min > 0.0 && fit_min < fit_max))
    throw ValidationError("params.fit_min", "need 0 < fit_min < fit_max");
  const Ball ball = param_ball(p, n);
  const auto bases = param_bases(p, n, ball, 16, data_seed(c));
  const auto times = dyadic_times(j_min, j_max);
  const auto ec = error_curve(field, c.symbol, c.curve, bases, times, param_method(p));

  // values at round-off carry no rate information
  const double floor = param_number(p, "value_floor", 1e-12);
  // single-band data: keep only the small-time regime t < lambda^{-m/alpha}
  double t_regime = std::numeric_limits<double>::infinity();
  if (c.data && c.data->kind == DataKind::band_limited)
    t_regime = std::pow(c.data->lambda, -c.symbol.growth_order() / c.curve.alpha());
  ErrorCurve kept{{}, {}, ec.method};
  for (std::size_t i = 0; i < ec.times.size(); ++i)
    if (ec.times[i] >= fit_min && ec.times[i] <= fit_max && ec.times[i] < t_regime && ec.values[i] > floor) {
      kept.times.push_back(ec.times[i]);
      kept.values.push_back(ec.values[i]);
    }
  if (kept.times.size() < 4)
    throw NoiseFloorError("rate-fit: fewer than 4 errors above the noise floor in the fit window",
                          kept.times.empty() ? fit_max : kept.times.back());
  const auto fit = fit_rate(kept);

  const double delta = c.data ? c.data->delta : 0.0;
  const double alpha = c.curve.alpha();
  double predicted = 0.0;
  // Schwartz data lies in every H^delta, so only the cap at alpha applies
  const bool schwartz = c.data && (c.data->kind == DataKind::gaussian || c.data->kind == DataKind::zero);
  if (schwartz)
    predicted = alpha;
  else if (c.symbol.kind() == SymbolKind::polynomial2d)
    predicted = predicted_rate_polynomial2d(c.symbol.m1(), c.symbol.m2(), delta);
  else
    predicted = std::min(predicted_rate(alpha, delta, c.symbol.growth_order()), alpha);

  CsvTable table{"rate-fit.csv", {"t", "E"}, {}, {}};
  for (std::size_t i = 0; i < ec.times.size(); ++i)
    table.rows.push_back({ec.times[i], ec.values[i]});
  table.footer = {{"theta", fit.theta}, {"residual", fit.residual}, {"predicted", predicted}};
  json scalars{{"theta", fit.theta},
               {"residual", fit.residual},
               {"predicted", predicted},
               {"alpha", alpha},
               {"fit_points", kept.times.size()},
               {"method", to_string(ec.method)}};
  return {"rate-fit", scalars, std::move(table)};
}

ResultEntry run_maximal(const ExperimentConfig& c)
{
  const int n = c.symbol.dimension();
  const auto& p = c.params;
  const auto lambdas = param_vector(p, "lambdas", {8.0, 16.0, 32.0});
  const int seed_count = param_int(p, "seeds", 8);
  if (seed_count < 1)
    throw ValidationError("params.seeds", "must be positive");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < seed_count; ++i)
    seeds.push_back(data_seed(c) + static_cast<std::uint64_t>(i));
  SweepOptions opt;
  opt.p = param_number(p, "p", 2.0);
  opt.ball = param_ball(p, n);
  opt.log_time_points = param_int(p, "log_time_points", 64);
  opt.space_points = param_int(p, "space_points", 64);
  const auto grid = make_grid(c.grid, n);
  const auto sweep = [&] {
    try {
      return exponent_sweep(grid, c.symbol, c.curve, lambdas, seeds, opt);
    } catch (const InvalidArgument& e) {
      throw ValidationError("params", e.what());
    }
  }();

  CsvTable table{"maximal.csv", {"lambda", "seed", "ratio"}, {}, {{"slope", sweep.slope}}};
  for (const auto& s : sweep.samples)
    table.rows.push_back({s.lambda, static_cast<double>(s.seed), s.ratio});
  json scalars{{"slope", sweep.slope}, {"lambdas", sweep.lambdas}, {"mean_ratios", sweep.mean_ratios}};
  return {"maximal", scalars, std::move(table)};
}

ResultEntry run_lower_bound(const ExperimentConfig& c, const SpectralField& field)
{
  const int n = c.symbol.dimension();
  if (c.curve.kind() != CurveKind::shift)
    throw ValidationError("curve.kind", "lower-bound runs along a shift curve");
  std::vector<double> e1(static_cast<std::size_t>(n), 0.0);
  e1[0] = 1.0;
  if (c.curve.direction() != e1)
    throw ValidationError("curve.v", "lower-bound runs along the first coordinate axis");
  const auto& p = c.params;
  const Ball ball = param_ball(p, n);
  const auto bases = param_bases(p, n, ball, 16, data_seed(c));
  const auto times = param_vector(p, "times", {});
  const auto res = lower_bound_check(field, c.symbol, c.curve.alpha(), bases, times);

  CsvTable table{"lower-bound.csv", {"t", "ratio", "floor"}, {}, {}};
  for (std::size_t i = 0; i < res.times.size(); ++i)
    table.rows.push_back({res.times[i], res.ratios[i], res.floor});
  json scalars{{"liminf_ratio", res.liminf_ratio}, {"floor", res.floor}, {"passed", res.passed}};
  return {"lower-bound", scalars, std::move(table)};
}

ResultEntry run_decompose(const ExperimentConfig& c, const SpectralField& field)
{
  const double s = param_number(c.params, "s", 1.0);
  const auto pieces = dyadic_decompose(field);
  CsvTable table{"decompose.csv", {"k", "l2_energy", "hs_energy"}, {}, {}};
  double l2_total = 0.0;
  for (const auto& piece : pieces) {
    const double l2 = std::pow(spectral_l2_norm(piece.field), 2);
    const double hs = std::pow(sobolev_norm(piece.field, s), 2);
    l2_total += l2;
    table.rows.push_back({static_cast<double>(piece.k), l2, hs});
  }
  json scalars{{"levels", pieces.size()},
               {"l2_energy", std::pow(spectral_l2_norm(field), 2)},
               {"piece_l2_energy_sum", l2_total}};
  if (c.symbol.kind() == SymbolKind::polynomial2d && field.band()) {
    const auto dec = anisotropic_decompose(field, c.symbol.m1(), c.symbol.m2());
    scalars["anisotropic_active"] = dec.tiling.active;
    scalars["anisotropic_tiles"] = dec.tiling.tiles;
  }
  return {"decompose", scalars, std::move(table)};
}

ResultEntry run_kernel_decay(const ExperimentConfig& c)
{
  if (c.symbol.kind() != SymbolKind::polynomial2d)
    throw ValidationError("symbol.kind", "kernel-decay needs a polynomial2d symbol");
  const auto& p = c.params;
  KernelParams kp;
  kp.m1 = c.symbol.m1();
  kp.m2 = c.symbol.m2();
  kp.sigma = c.symbol.sigma();
  kp.lambda = param_number(p, "lambda", 16.0);
  kp.k = param_int(p, "k", 4);
  const auto x = param_point(p, "x", 2);
  const auto y = param_point(p, "y", 2);
  const double base = 100.0 * std::pow(kp.lambda, 1.0 - kp.m1);
  const auto seps = param_vector(p, "separations", {base, 2 * base, 4 * base, 8 * base});
  const auto fit = kernel_decay_fit(kp, c.curve, x, y, seps);

  CsvTable table{"kernel-decay.csv", {"separation", "abs_K"}, {}, {{"fitted_slope", fit.slope}}};
  json floors = json::array();
  for (const auto& s : fit.samples) {
    table.rows.push_back({s.separation, s.abs_k});
    floors.push_back(s.noise_floor);
  }
  json scalars{{"fitted_slope", fit.slope},
               {"residual", fit.residual},
               {"underflow", fit.underflow},
               {"noise_floors", floors}};
  return {"kernel-decay", scalars, std::move(table)};
}

} // namespace

Report run_experiment(const ExperimentConfig& c, const std::filesystem::path& base_dir)
{
  Report report;
  report.config = config_to_json(c);
  std::optional<SpectralField> field;
  if (c.data)
    field = make_data(*c.data, make_grid(c.grid, c.symbol.dimension()), base_dir);

  switch (c.experiment) {
    case ExperimentKind::propagate: report.results.push_back(run_propagate(c, *field)); break;
    case ExperimentKind::rate_fit: report.results.push_back(run_rate_fit(c, *field)); break;
    case ExperimentKind::maximal: report.results.push_back(run_maximal(c)); break;
    case ExperimentKind::lower_bound: report.results.push_back(run_lower_bound(c, *field)); break;
    case ExperimentKind::decompose: report.results.push_back(run_decompose(c, *field)); break;
    case ExperimentKind::kernel_decay: report.results.push_back(run_kernel_decay(c)); break;
  }
  return report;
}

std::filesystem::path run(const RunRequest& request)
{
  std::ifstream in(request.config_path, std::ios::binary);
  if (!in)
    throw IoError("cannot open config", request.config_path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json doc = json::parse(bytes, nullptr, false);
  if (doc.is_discarded())
    throw ValidationError("(document)", "config is not valid JSON");
  if (doc.is_object() && !doc.contains("experiment"))
    doc["experiment"] = to_string(request.command);
  const auto config = parse_config(doc);
  if (config.experiment != request.command)
    throw ValidationError("experiment", "config is for '" + to_string(config.experiment) + "' but the command is '" +
                                            to_string(request.command) + "'");

  const auto base_dir = request.config_path.parent_path();
  auto report = run_experiment(config, base_dir.empty() ? std::filesystem::path(".") : base_dir);
  report.input_hash = git_blob_hash(bytes);
  if (config.data && config.data->kind == DataKind::file) {
    std::filesystem::path dp(config.data->path);
    if (dp.is_relative())
      dp = base_dir / dp;
    report.results.front().scalars["data_hash"] = git_blob_hash_file(dp);
  }

  std::filesystem::path out = request.out_dir ? *request.out_dir
                              : config.output_dir.empty()
                                ? std::filesystem::path(".")
                                : std::filesystem::path(config.output_dir);
  emit_report(report, out);
  return out;
}

} // namespace curveprop
