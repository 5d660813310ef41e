#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace curveprop {

/// A CSV detail file: header row, numeric rows and `#`-prefixed footer lines.
struct CsvTable
{
  std::string filename;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> footer;
};

struct ResultEntry
{
  std::string kind;
  nlohmann::json scalars = nlohmann::json::object();
  std::optional<CsvTable> table;
};

struct Report
{
  nlohmann::json config = nlohmann::json::object();
  std::string input_hash;
  std::vector<ResultEntry> results;
};

/// 17 significant digits.
std::string format_double(double v);
std::string render_csv(const CsvTable& table);

/// Git blob hash: SHA-1 of "blob <size>\0" followed by the bytes.
std::string git_blob_hash(const std::string& bytes);
std::string git_blob_hash_file(const std::filesystem::path& path);

/// Writes summary.json and one CSV per table into `dir`, each through a
/// temporary file and rename. Throws DataIntegrityError on a non-finite
/// value before anything is written and IoError on a filesystem failure.
void emit_report(const Report& report, const std::filesystem::path& dir);

} // namespace curveprop
