// SPDX-License-Identifier: Apache-2.0
// Run configuration: one structured JSON file whose keys are mirrored by
// command-line flags (flag overrides file), validated before any
// computation starts. Builds the protocol for the three built-in model
// kinds: the driven thermal qubit, the trapped-ion ladder twin, and frozen
// custom models loaded from plain-text complex-matrix files.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qjs/ion.hpp"
#include "qjs/protocol.hpp"

namespace qjs::cli {

struct RunConfig {
  // model: qubit | ion | custom
  std::string model = "qubit";
  qjs::QubitDriveParams qubit{};
  qjs::IonParams ion{};
  std::string custom_hamiltonian;          // path to H matrix file
  std::vector<std::string> custom_jumps;   // paths to jump matrix files
  double custom_tau = 1.0;

  // trajectory sampling
  std::uint64_t seed = 20260813;
  std::int64_t n_traj = 20000;
  double dt = 0.01;
  int blocks = 20;
  double rate_cap = 0.05;

  // counting fields / exact route
  double u = 1.0, v = 0.0;
  double du = 0.02;
  double mgf_rel_tol = 1e-9;

  // slow-driving quadrature
  int panels = 3;
  int points_per_panel = 64;

  // detailed-FT histogram
  int bins = 12;
  std::int64_t min_count = 100;
  double z_tol = 3.0;

  // check gates
  double ift_tol = 1e-8;       // exact-route |G(1,0) - 1|
  double fdr_tol = 1e-8;       // |var_sigma - 2(mean_sigma + dI_sigma)|
  double sym_tol = 1e-10;      // slow CGF symmetry residual
  double slow_rel_tol = 0.05;  // cross-check gate on the slow route
  double tur_bound = 2.0;

  // fig1 sweep grid
  int n_teq = 25, n_tc = 25;
  double teq_min = 0.05, teq_max = 5.0;
  double tc_min = 0.5, tc_max = 4.0;

  // artifacts
  std::string output_dir;  // empty: $QJS_OUTPUT_DIR or "."
  std::string tag = "qjs";
};

// Parse a JSON config file into `c` (missing keys keep their current
// values). Unknown keys are a ConfigError so typos fail fast.
void apply_config_file(const std::string& path, RunConfig& c);

// Canonical echo of every knob; hashing input and the file the
// reproducibility block embeds. Key order is alphabetical (nlohmann
// objects are ordered maps), so the text is unique for a given config.
nlohmann::json canonical_json(const RunConfig& c);

// Validates cross-field constraints (model kind known, positive counts,
// grid ordering, custom file list non-empty, ...). Throws ConfigError
// naming the violated precondition.
void validate(const RunConfig& c);

// Plain-text complex matrix format: first non-comment line "rows cols",
// then rows*cols row-major entries "re,im" separated by whitespace.
// '#' starts a comment. Throws ConfigError on malformed input.
qjs::Mat read_matrix_file(const std::string& path);

// Build the configured protocol. Custom models are frozen in time
// (constant generator over [0, custom_tau], no driving work; entropy
// production statistics only).
qjs::Protocol build_protocol(const RunConfig& c);

// True when the configured protocol carries thermal (work) bookkeeping.
bool is_thermal(const RunConfig& c);

}  // namespace qjs::cli
