#include "curveprop/report.hpp"

#include "curveprop/errors.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <mutex>
#include <sstream>

namespace curveprop {

namespace {

std::mutex emit_mutex;

void check_finite(const nlohmann::json& j, const std::string& where)
{
  if (j.is_number_float() && !std::isfinite(j.get<double>()))
    throw DataIntegrityError("non-finite value in " + where);
  if (j.is_structured())
    for (const auto& [key, value] : j.items())
      check_finite(value, where + "." + key);
}

void check_finite(const CsvTable& t)
{
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size())
      throw DataIntegrityError(t.filename + ": row width does not match the header");
    for (double v : row)
      if (!std::isfinite(v))
        throw DataIntegrityError("non-finite value in " + t.filename);
  }
  for (const auto& [key, v] : t.footer)
    if (!std::isfinite(v))
      throw DataIntegrityError("non-finite footer value '" + key + "' in " + t.filename);
}

void write_atomic(const std::filesystem::path& path, const std::string& text)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot open for writing", tmp.string());
    out << text;
    out.flush();
    if (!out)
      throw IoError("write failed", tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("rename failed", path.string());
  }
}

} // namespace

std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const CsvTable& t)
{
  std::string s;
  for (std::size_t i = 0; i < t.header.size(); ++i)
    s += (i ? "," : "") + t.header[i];
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      s += (i ? "," : "") + format_double(row[i]);
    s += '\n';
  }
  for (const auto& [key, v] : t.footer)
    s += "# " + key + "=" + format_double(v) + '\n';
  return s;
}

std::string git_blob_hash(const std::string& bytes)
{
  const std::string head = "blob " + std::to_string(bytes.size()) + '\0';
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), head.data(), head.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw DataIntegrityError("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string git_blob_hash_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open for reading", path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return git_blob_hash(bytes);
}

void emit_report(const Report& report, const std::filesystem::path& dir)
{
  check_finite(report.config, "config");
  for (const auto& r : report.results) {
    check_finite(r.scalars, r.kind);
    if (r.table)
      check_finite(*r.table);
  }

  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : report.results) {
    nlohmann::json e{{"kind", r.kind}, {"scalars", r.scalars}};
    if (r.table)
      e["csv"] = r.table->filename;
    results.push_back(std::move(e));
  }
  nlohmann::json summary{{"schema_version", report.config.value("schema_version", 1)},
                         {"experiment", report.config.value("experiment", "")},
                         {"config", report.config},
                         {"input_hash", report.input_hash},
                         {"status", "ok"},
                         {"results", results}};

  std::lock_guard lock(emit_mutex);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory", dir.string());
  for (const auto& r : report.results)
    if (r.table)
      write_atomic(dir / r.table->filename, render_csv(*r.table));
  write_atomic(dir / "summary.json", summary.dump(2) + '\n');
}

} // namespace curveprop
