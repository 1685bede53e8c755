#pragma once

// Plain CSV tables with "# key: value" provenance lines ahead of the header.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vcqed/error.hpp"

namespace vcqed {

inline constexpr const char* kEngineName = "vcqed";
inline constexpr const char* kEngineVersion = "0.1.0";

/// Fixed, locale-independent number formatting so repeated runs give
/// identical bytes.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

inline std::string format_number(long long v) { return std::to_string(v); }
inline std::string format_number(int v) { return std::to_string(v); }
inline std::string format_number(std::size_t v) { return std::to_string(v); }

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct CsvTable {
  std::string file;  // file name relative to the output directory
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }

  template <class... T>
  void add_row(const T&... v) {
    rows.push_back({format_number(v)...});
  }

  std::size_t column(std::string_view name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
      if (columns[k] == name) return k;
    throw Error(ErrorKind::InvalidIndex, "no column '" + std::string(name) + "'");
  }
};

namespace detail {
inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}
}  // namespace detail

inline std::string to_csv_string(const CsvTable& t) {
  std::string out;
  out += std::string("# engine: ") + kEngineName + " " + kEngineVersion + "\n";
  for (const auto& [k, v] : t.meta) out += "# " + k + ": " + v + "\n";
  for (std::size_t k = 0; k < t.columns.size(); ++k) {
    if (k) out += ',';
    out += detail::csv_escape(t.columns[k]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) {
      throw Error(ErrorKind::DimensionMismatch, "CSV row width differs from header in " + t.file);
    }
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += detail::csv_escape(row[k]);
    }
    out += '\n';
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
  out << text;
}

/// Writes `dir/t.file` and a provenance sidecar `dir/t.file.json`.
inline void write_table(const std::filesystem::path& dir, const CsvTable& t,
                        const nlohmann::ordered_json& provenance = nlohmann::ordered_json::object()) {
  const std::string body = to_csv_string(t);
  write_text(dir / t.file, body);
  nlohmann::ordered_json side = provenance;
  side["engine"] = kEngineName;
  side["engine_version"] = kEngineVersion;
  side["file"] = t.file;
  side["rows"] = t.rows.size();
  side["columns"] = t.columns;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  side["meta"] = meta;
  side["content_hash"] = hex64(fnv1a(body));
  write_text(dir / (t.file + ".json"), side.dump(2) + "\n");
}

}  // namespace vcqed
