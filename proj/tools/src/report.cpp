// SPDX-License-Identifier: Apache-2.0
#include "report.hpp"

#include <Eigen/Core>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace qjs::cli {

json tagged(double value, const std::string& route, const std::string& kind,
            double tol) {
  json j;
  j["value"] = value;
  j["route"] = route;
  j["tol_kind"] = kind;
  j["tol"] = kind == "none" ? 0.0 : tol;
  return j;
}

json tagged_count(std::int64_t value, const std::string& route) {
  json j;
  j["value"] = value;
  j["route"] = route;
  j["tol_kind"] = "exact";
  j["tol"] = 0.0;
  return j;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json reproducibility_block(const json& canonical_config, std::uint64_t seed) {
  const std::string text = canonical_config.dump();
  json j;
  j["config"] = text;  // canonical single-line form; also the hash input
  j["config_hash"] = fnv1a_hex(text);
  j["seed"] = seed;
  json v;
  v["qjs"] = std::string(QJS_VERSION);
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
               std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
              std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  j["versions"] = v;
  return j;
}

std::string csv_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_cell(std::int64_t v) {
  return std::to_string(v);
}

namespace {

void atomic_write(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out.flush()) throw std::runtime_error("short write: " + path);
  }
  fs::rename(tmp, p);
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  atomic_write(path, text);
}

void write_json(const std::string& path, const json& report) {
  atomic_write(path, report.dump(2) + "\n");
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::string text;
  auto emit_row = [&text](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ',';
      text += row[i];
    }
    text += '\n';
  };
  emit_row(table.header);
  for (const auto& row : table.rows) emit_row(row);
  atomic_write(path, text);
}

std::string resolve_output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("QJS_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace qjs::cli
