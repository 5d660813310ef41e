#pragma once

#include "curveprop/curve.hpp"
#include "curveprop/fields.hpp"
#include "curveprop/symbol.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace curveprop {

inline constexpr int config_schema_version = 1;

enum class ExperimentKind
{
  propagate,
  rate_fit,
  maximal,
  lower_bound,
  decompose,
  kernel_decay,
};

std::string to_string(ExperimentKind kind);
/// Accepts the command spelling ("rate-fit"); throws ValidationError.
ExperimentKind experiment_kind_from_string(const std::string& name);

struct GridSpec
{
  double xi_max = 64.0;
  int points = 2048;

  bool operator==(const GridSpec&) const = default;
};

/// Default frequency grid for a dimension.
GridSpec default_grid(int n);

enum class DataKind
{
  gaussian,
  band_limited,
  graded,
  sobolev,
  zero,
  file,
};

std::string to_string(DataKind kind);

struct DataSpec
{
  DataKind kind = DataKind::gaussian;
  double width = 1.0;
  double lambda = 8.0;
  double s = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  int k_min = 0;
  std::optional<int> k_max;
  std::string path;

  bool operator==(const DataSpec&) const = default;
};

struct ExperimentConfig
{
  int schema_version = config_schema_version;
  ExperimentKind experiment = ExperimentKind::propagate;
  Symbol symbol = Symbol::elliptic(1);
  Curve curve = Curve::vertical(1);
  GridSpec grid;
  std::optional<DataSpec> data;
  /// Experiment-specific parameters, validated by the runner.
  nlohmann::json params = nlohmann::json::object();
  std::string output_dir;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Validates and converts a config document. Errors carry the JSON field
/// path, e.g. "symbol.m1".
ExperimentConfig parse_config(const nlohmann::json& doc);
/// Canonical JSON form; parse_config(config_to_json(c)) == c.
nlohmann::json config_to_json(const ExperimentConfig& config);

nlohmann::json symbol_to_json(const Symbol& sym);
Symbol symbol_from_json(const nlohmann::json& j, const std::string& path = "symbol");
nlohmann::json curve_to_json(const Curve& curve);
Curve curve_from_json(const nlohmann::json& j, int n, const std::string& path = "curve");

FrequencyGrid make_grid(const GridSpec& spec, int n);
/// Builds the data field; relative file paths resolve against `base_dir`.
SpectralField make_data(const DataSpec& spec, const FrequencyGrid& grid, const std::filesystem::path& base_dir);

} // namespace curveprop
