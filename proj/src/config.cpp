#include "curveprop/config.hpp"

#include "curveprop/errors.hpp"
#include "curveprop/experiments.hpp"

#include <cmath>

namespace curveprop {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& require(const json& obj, const std::string& key, const std::string& path)
{
  if (!obj.is_object())
    throw ValidationError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError(join(path, key), "required field is missing");
  return *it;
}

double number(const json& j, const std::string& path)
{
  if (!j.is_number())
    throw ValidationError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v))
    throw ValidationError(path, "expected a finite number");
  return v;
}

int integer(const json& j, const std::string& path)
{
  if (!j.is_number_integer())
    throw ValidationError(path, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& path)
{
  if (!j.is_string())
    throw ValidationError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> vector_of(const json& j, const std::string& path)
{
  if (!j.is_array())
    throw ValidationError(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path)
{
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, join(path, key));
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path)
{
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      ok = ok || key == k;
    if (!ok)
      throw ValidationError(join(path, key), "unknown field");
  }
}

/// Re-raises library argument errors as validation errors at `path`.
template <class F>
auto validated(const std::string& path, F&& make)
{
  try {
    return make();
  } catch (const InvalidArgument& e) {
    throw ValidationError(path, e.what());
  }
}

DataKind data_kind_from_string(const std::string& s, const std::string& path)
{
  for (auto k : {DataKind::gaussian, DataKind::band_limited, DataKind::graded, DataKind::sobolev, DataKind::zero,
                 DataKind::file})
    if (to_string(k) == s)
      return k;
  throw ValidationError(path, "unknown data kind '" + s + "'");
}

DataSpec data_from_json(const json& j, const std::string& path)
{
  if (!j.is_object())
    throw ValidationError(path, "expected an object");
  reject_unknown(j, {"kind", "width", "lambda", "s", "delta", "seed", "k_min", "k_max", "path"}, path);
  DataSpec d;
  d.kind = data_kind_from_string(text(require(j, "kind", path), join(path, "kind")), join(path, "kind"));
  d.width = number_or(j, "width", d.width, path);
  d.lambda = number_or(j, "lambda", d.lambda, path);
  d.s = number_or(j, "s", d.s, path);
  d.delta = number_or(j, "delta", d.delta, path);
  if (j.contains("seed")) {
    const auto& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ValidationError(join(path, "seed"), "expected a non-negative integer");
    d.seed = s.get<std::uint64_t>();
  }
  if (j.contains("k_min"))
    d.k_min = integer(j["k_min"], join(path, "k_min"));
  if (j.contains("k_max"))
    d.k_max = integer(j["k_max"], join(path, "k_max"));
  if (j.contains("path"))
    d.path = text(j["path"], join(path, "path"));

  switch (d.kind) {
    case DataKind::gaussian:
      if (!(d.width > 0.0))
        throw ValidationError(join(path, "width"), "must be positive");
      break;
    case DataKind::band_limited:
      if (!(d.lambda >= 1.0))
        throw ValidationError(join(path, "lambda"), "must be >= 1");
      break;
    case DataKind::graded:
      if (d.k_min < 0 || (d.k_max && *d.k_max < d.k_min))
        throw ValidationError(join(path, "k_max"), "need 0 <= k_min <= k_max");
      if (d.delta < 0.0)
        throw ValidationError(join(path, "delta"), "must be >= 0");
      break;
    case DataKind::file:
      if (d.path.empty())
        throw ValidationError(join(path, "path"), "file data needs a path");
      break;
    case DataKind::sobolev:
    case DataKind::zero: break;
  }
  return d;
}

json data_to_json(const DataSpec& d)
{
  json j{{"kind", to_string(d.kind)}};
  switch (d.kind) {
    case DataKind::gaussian: j["width"] = d.width; break;
    case DataKind::band_limited:
      j["lambda"] = d.lambda;
      j["seed"] = d.seed;
      break;
    case DataKind::graded:
      j["s"] = d.s;
      j["delta"] = d.delta;
      j["seed"] = d.seed;
      j["k_min"] = d.k_min;
      if (d.k_max)
        j["k_max"] = *d.k_max;
      break;
    case DataKind::sobolev:
      j["s"] = d.s;
      j["seed"] = d.seed;
      break;
    case DataKind::zero: break;
    case DataKind::file: j["path"] = d.path; break;
  }
  // delta is also read by rate-fit predictions for non-graded data
  if (d.kind != DataKind::graded && d.delta != 0.0)
    j["delta"] = d.delta;
  return j;
}

} // namespace

std::string to_string(ExperimentKind kind)
{
  switch (kind) {
    case ExperimentKind::propagate: return "propagate";
    case ExperimentKind::rate_fit: return "rate-fit";
    case ExperimentKind::maximal: return "maximal";
    case ExperimentKind::lower_bound: return "lower-bound";
    case ExperimentKind::decompose: return "decompose";
    case ExperimentKind::kernel_decay: return "kernel-decay";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name)
{
  for (auto k : {ExperimentKind::propagate, ExperimentKind::rate_fit, ExperimentKind::maximal,
                 ExperimentKind::lower_bound, ExperimentKind::decompose, ExperimentKind::kernel_decay})
    if (to_string(k) == name)
      return k;
  throw ValidationError("experiment", "unknown experiment '" + name + "'");
}

std::string to_string(DataKind kind)
{
  switch (kind) {
    case DataKind::gaussian: return "gaussian";
    case DataKind::band_limited: return "band_limited";
    case DataKind::graded: return "graded";
    case DataKind::sobolev: return "sobolev";
    case DataKind::zero: return "zero";
    case DataKind::file: return "file";
  }
  return "unknown";
}

GridSpec default_grid(int n)
{
  if (n == 1)
    return {64.0, 2048};
  if (n == 2)
    return {64.0, 256};
  return {16.0, 32};
}

json symbol_to_json(const Symbol& sym)
{
  json j{{"kind", to_string(sym.kind())}, {"n", sym.dimension()}};
  switch (sym.kind()) {
    case SymbolKind::elliptic: break;
    case SymbolKind::nonelliptic: j["signs"] = sym.signs(); break;
    case SymbolKind::fractional: j["a"] = sym.exponent(); break;
    case SymbolKind::polynomial2d:
      j["m1"] = sym.m1();
      j["m2"] = sym.m2();
      j["sigma"] = sym.sigma();
      break;
    case SymbolKind::polynomial: {
      json coeffs = json::array();
      for (const auto& [exps, c] : sym.terms())
        coeffs.push_back({{"exponents", exps}, {"coeff", c}});
      j["coeffs"] = coeffs;
      break;
    }
  }
  return j;
}

Symbol symbol_from_json(const json& j, const std::string& path)
{
  if (!j.is_object())
    throw ValidationError(path, "expected an object");
  reject_unknown(j, {"kind", "n", "m1", "m2", "sigma", "a", "coeffs", "signs"}, path);
  const auto kind_path = join(path, "kind");
  SymbolKind kind;
  try {
    kind = symbol_kind_from_string(text(require(j, "kind", path), kind_path));
  } catch (const InvalidArgument& e) {
    throw ValidationError(kind_path, e.what());
  }

  int n = kind == SymbolKind::polynomial2d ? 2 : 1;
  if (j.contains("n"))
    n = integer(j["n"], join(path, "n"));
  else if (kind == SymbolKind::nonelliptic)
    n = j.contains("signs") && j["signs"].is_array() ? static_cast<int>(j["signs"].size()) : 2;
  else if (kind == SymbolKind::polynomial && j.contains("coeffs") && j["coeffs"].is_array() && !j["coeffs"].empty() &&
           j["coeffs"][0].is_object() && j["coeffs"][0].contains("exponents") && j["coeffs"][0]["exponents"].is_array())
    n = static_cast<int>(j["coeffs"][0]["exponents"].size());
  if (n < 1)
    throw ValidationError(join(path, "n"), "dimension must be positive");

  switch (kind) {
    case SymbolKind::elliptic: return Symbol::elliptic(n);
    case SymbolKind::nonelliptic:
      if (j.contains("signs")) {
        std::vector<int> signs;
        const auto& s = j["signs"];
        if (!s.is_array())
          throw ValidationError(join(path, "signs"), "expected an array");
        for (std::size_t i = 0; i < s.size(); ++i)
          signs.push_back(integer(s[i], join(path, "signs") + "[" + std::to_string(i) + "]"));
        if (j.contains("n") && static_cast<int>(signs.size()) != n)
          throw ValidationError(join(path, "signs"), "length must equal n");
        return validated(join(path, "signs"), [&] { return Symbol::nonelliptic(signs); });
      }
      return validated(join(path, "n"), [&] { return Symbol::nonelliptic(n); });
    case SymbolKind::fractional: {
      const double a = number(require(j, "a", path), join(path, "a"));
      return validated(join(path, "a"), [&] { return Symbol::fractional(n, a); });
    }
    case SymbolKind::polynomial2d: {
      if (n != 2)
        throw ValidationError(join(path, "n"), "polynomial2d symbols have n = 2");
      const int m1 = integer(require(j, "m1", path), join(path, "m1"));
      const int m2 = integer(require(j, "m2", path), join(path, "m2"));
      const int sigma = j.contains("sigma") ? integer(j["sigma"], join(path, "sigma")) : 1;
      if (m1 < 2 || m2 < m1)
        throw ValidationError(join(path, "m1"), "need integers 2 <= m1 <= m2");
      return validated(join(path, "sigma"), [&] { return Symbol::polynomial2d(m1, m2, sigma); });
    }
    case SymbolKind::polynomial: {
      const auto& c = require(j, "coeffs", path);
      const auto cpath = join(path, "coeffs");
      if (!c.is_array())
        throw ValidationError(cpath, "expected an array of {exponents, coeff}");
      Symbol::ExponentTable table;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const auto tpath = cpath + "[" + std::to_string(i) + "]";
        const auto& e = require(c[i], "exponents", tpath);
        if (!e.is_array())
          throw ValidationError(join(tpath, "exponents"), "expected an array");
        std::vector<int> exps;
        for (std::size_t q = 0; q < e.size(); ++q)
          exps.push_back(integer(e[q], join(tpath, "exponents") + "[" + std::to_string(q) + "]"));
        table[exps] += number(require(c[i], "coeff", tpath), join(tpath, "coeff"));
      }
      return validated(cpath, [&] { return Symbol::polynomial(n, table); });
    }
  }
  throw ValidationError(kind_path, "unsupported symbol kind");
}

json curve_to_json(const Curve& curve)
{
  json j{{"kind", to_string(curve.kind())}};
  switch (curve.kind()) {
    case CurveKind::vertical: break;
    case CurveKind::shift:
      j["alpha"] = curve.alpha();
      j["v"] = curve.direction();
      break;
    case CurveKind::linear_drift: j["v"] = curve.direction(); break;
    case CurveKind::tabulated: {
      j["alpha"] = curve.alpha();
      json knots = json::array();
      for (const auto& k : curve.knots())
        knots.push_back({{"t", k.time}, {"matrix", k.matrix}, {"offset", k.offset}});
      j["knots"] = knots;
      break;
    }
  }
  return j;
}

Curve curve_from_json(const json& j, int n, const std::string& path)
{
  if (!j.is_object())
    throw ValidationError(path, "expected an object");
  reject_unknown(j, {"kind", "alpha", "v", "knots"}, path);
  const auto kind_path = join(path, "kind");
  CurveKind kind;
  try {
    kind = curve_kind_from_string(text(require(j, "kind", path), kind_path));
  } catch (const InvalidArgument& e) {
    throw ValidationError(kind_path, e.what());
  }
  auto direction = [&] {
    std::vector<double> v;
    if (j.contains("v")) {
      v = vector_of(j["v"], join(path, "v"));
    } else {
      v.assign(static_cast<std::size_t>(n), 0.0);
      v[0] = 1.0;
    }
    if (static_cast<int>(v.size()) != n)
      throw ValidationError(join(path, "v"), "length must equal the symbol dimension " + std::to_string(n));
    return v;
  };
  switch (kind) {
    case CurveKind::vertical: return Curve::vertical(n);
    case CurveKind::shift: {
      const double alpha = number(require(j, "alpha", path), join(path, "alpha"));
      auto v = direction();
      return validated(join(path, "alpha"), [&] { return Curve::shift(v, alpha); });
    }
    case CurveKind::linear_drift: {
      auto v = direction();
      return Curve::linear_drift(v);
    }
    case CurveKind::tabulated: {
      const double alpha = number_or(j, "alpha", 1.0, path);
      const auto& ks = require(j, "knots", path);
      const auto kpath = join(path, "knots");
      if (!ks.is_array())
        throw ValidationError(kpath, "expected an array");
      std::vector<AffineKnot> knots;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto p = kpath + "[" + std::to_string(i) + "]";
        AffineKnot k;
        k.time = number(require(ks[i], "t", p), join(p, "t"));
        const auto& m = require(ks[i], "matrix", p);
        if (!m.is_array())
          throw ValidationError(join(p, "matrix"), "expected an array");
        // accept nested rows or a flat row-major list
        for (std::size_t r = 0; r < m.size(); ++r) {
          if (m[r].is_array()) {
            const auto row = vector_of(m[r], join(p, "matrix") + "[" + std::to_string(r) + "]");
            k.matrix.insert(k.matrix.end(), row.begin(), row.end());
          } else {
            k.matrix.push_back(number(m[r], join(p, "matrix") + "[" + std::to_string(r) + "]"));
          }
        }
        k.offset = vector_of(require(ks[i], "offset", p), join(p, "offset"));
        knots.push_back(std::move(k));
      }
      return validated(kpath, [&] { return Curve::tabulated(n, knots, alpha); });
    }
  }
  throw ValidationError(kind_path, "unsupported curve kind");
}

ExperimentConfig parse_config(const json& doc)
{
  if (!doc.is_object())
    throw ValidationError("(document)", "config must be a JSON object");
  reject_unknown(doc, {"schema_version", "experiment", "symbol", "curve", "grid", "data", "params", "outputs"}, "");

  ExperimentConfig c;
  c.schema_version = integer(require(doc, "schema_version", ""), "schema_version");
  if (c.schema_version != config_schema_version)
    throw ValidationError("schema_version", "unsupported schema version " + std::to_string(c.schema_version));
  c.experiment = experiment_kind_from_string(text(require(doc, "experiment", ""), "experiment"));
  c.symbol = symbol_from_json(require(doc, "symbol", ""), "symbol");
  const int n = c.symbol.dimension();
  c.curve = doc.contains("curve") ? curve_from_json(doc["curve"], n, "curve") : Curve::vertical(n);

  c.grid = default_grid(n);
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    if (!g.is_object())
      throw ValidationError("grid", "expected an object");
    reject_unknown(g, {"xi_max", "points"}, "grid");
    c.grid.xi_max = number_or(g, "xi_max", c.grid.xi_max, "grid");
    if (g.contains("points"))
      c.grid.points = integer(g["points"], "grid.points");
  }
  if (!(c.grid.xi_max > 0.0))
    throw ValidationError("grid.xi_max", "must be positive");
  if (c.grid.points < 8)
    throw ValidationError("grid.points", "must be at least 8");

  if (doc.contains("data"))
    c.data = data_from_json(doc["data"], "data");
  const bool needs_data = c.experiment != ExperimentKind::maximal && c.experiment != ExperimentKind::kernel_decay;
  if (needs_data && !c.data)
    throw ValidationError("data", "required field is missing");

  if (doc.contains("params")) {
    if (!doc["params"].is_object())
      throw ValidationError("params", "expected an object");
    c.params = doc["params"];
  }
  if (doc.contains("outputs")) {
    const auto& o = doc["outputs"];
    if (!o.is_object())
      throw ValidationError("outputs", "expected an object");
    reject_unknown(o, {"dir"}, "outputs");
    if (o.contains("dir"))
      c.output_dir = text(o["dir"], "outputs.dir");
  }

  // curves paired with mixed-degree symbols must have alpha = 1/(m1 - 1)
  const bool rate_experiment = c.experiment == ExperimentKind::rate_fit || c.experiment == ExperimentKind::maximal ||
                               c.experiment == ExperimentKind::lower_bound;
  if (rate_experiment && c.symbol.kind() == SymbolKind::polynomial2d && !c.curve.time_independent()) {
    const double want = 1.0 / (c.symbol.m1() - 1);
    if (std::abs(c.curve.alpha() - want) > 1e-12)
      throw ValidationError("curve.alpha", "must equal 1/(m1-1) = " + std::to_string(want) + " for polynomial2d symbols");
  }
  if (c.experiment == ExperimentKind::rate_fit && c.data) {
    const double m = c.symbol.kind() == SymbolKind::polynomial2d ? c.symbol.m2() : c.symbol.growth_order();
    if (!(c.data->delta >= 0.0 && c.data->delta < m))
      throw ValidationError("data.delta", "must satisfy 0 <= delta < m");
  }
  return c;
}

json config_to_json(const ExperimentConfig& c)
{
  json j{{"schema_version", c.schema_version},
         {"experiment", to_string(c.experiment)},
         {"symbol", symbol_to_json(c.symbol)},
         {"curve", curve_to_json(c.curve)},
         {"grid", {{"xi_max", c.grid.xi_max}, {"points", c.grid.points}}},
         {"params", c.params}};
  if (c.data)
    j["data"] = data_to_json(*c.data);
  if (!c.output_dir.empty())
    j["outputs"] = {{"dir", c.output_dir}};
  return j;
}

FrequencyGrid make_grid(const GridSpec& spec, int n)
{
  return validated("grid", [&] { return FrequencyGrid(n, spec.xi_max, spec.points); });
}

SpectralField make_data(const DataSpec& spec, const FrequencyGrid& grid, const std::filesystem::path& base_dir)
{
  switch (spec.kind) {
    case DataKind::gaussian: return make_gaussian(grid, spec.width);
    case DataKind::band_limited:
      return validated("data.lambda", [&] { return make_band_limited_random(grid, spec.lambda, spec.seed); });
    case DataKind::graded: {
      const int top = static_cast<int>(std::floor(std::log2(grid.xi_max() / 2.0)));
      const int k_max = spec.k_max.value_or(top);
      if (k_max > top)
        throw ValidationError("data.k_max", "band 2^k_max exceeds half the grid width");
      return validated("data", [&] { return make_graded_data(grid, spec.s, spec.delta, spec.seed, spec.k_min, k_max); });
    }
    case DataKind::sobolev: return make_sobolev_profile(grid, SobolevProfile{spec.s, spec.seed});
    case DataKind::zero: return make_zero(grid);
    case DataKind::file: {
      std::filesystem::path p(spec.path);
      if (p.is_relative())
        p = base_dir / p;
      auto f = read_field(p);
      if (f.dimension() != grid.dimension())
        throw ValidationError("data.path", "field file dimension does not match the symbol");
      return f;
    }
  }
  throw ValidationError("data.kind", "unsupported data kind");
}

} // namespace curveprop
