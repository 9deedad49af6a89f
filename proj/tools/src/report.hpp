// SPDX-License-Identifier: Apache-2.0
// Serialized run artifacts: a JSON report in which every numeric result is
// tagged with the route that produced it and the tolerance that qualifies
// it, CSV tables at full double precision, and a reproducibility block
// (config hash, seed, library versions). Artifacts contain no timestamps or
// wall times so identical (config, seed) runs write byte-identical files.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qjs::cli {

using json = nlohmann::json;

// A result value tagged with provenance. `kind` names the semantics of
// `tol`: "se" (one standard error), "abs", "rel", "stencil" (finite
// difference step), or "none" for exact-by-construction quantities
// (tol ignored, serialized as 0).
json tagged(double value, const std::string& route, const std::string& kind,
            double tol);

// Integer counters still carry a route tag so the report has no bare
// numbers outside the reproducibility block.
json tagged_count(std::int64_t value, const std::string& route);

// FNV-1a 64-bit hash of the canonical config text, hex-encoded.
std::string fnv1a_hex(const std::string& text);

// {config_hash, config (canonical text), seed, versions{...}}.
json reproducibility_block(const json& canonical_config, std::uint64_t seed);

// Full-precision CSV ("%.17g", '.' decimal, no locale). `rows` are
// pre-formatted cells; numeric helpers below format the cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
std::string csv_cell(double v);
std::string csv_cell(std::int64_t v);

// Writers; create parent directories as needed and never write partial
// files (write to a temp name, then rename).
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& report);
void write_csv(const std::string& path, const CsvTable& table);

// Resolve the output directory: --output-dir flag if set, else
// $QJS_OUTPUT_DIR, else ".".
std::string resolve_output_dir(const std::string& flag_value);

}  // namespace qjs::cli
