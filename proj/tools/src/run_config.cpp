// SPDX-License-Identifier: Apache-2.0
#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "qjs/types.hpp"

namespace qjs::cli {

using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qjs::ConfigError("config file not readable: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw qjs::ConfigError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw qjs::ConfigError("config root must be an object");
  return j;
}

// Assign dst from key if present; track consumed keys.
template <typename T>
void take(const json& j, std::set<std::string>& seen, const char* key,
          T& dst) {
  if (auto it = j.find(key); it != j.end()) {
    seen.insert(key);
    try {
      dst = it->get<T>();
    } catch (const json::exception& e) {
      throw qjs::ConfigError(std::string("config key '") + key +
                             "': " + e.what());
    }
  }
}

void reject_unknown(const json& j, const std::set<std::string>& seen,
                    const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!seen.count(it.key())) {
      throw qjs::ConfigError("unknown config key '" + scope + it.key() + "'");
    }
  }
}

}  // namespace

void apply_config_file(const std::string& path, RunConfig& c) {
  const json j = load_json_file(path);
  std::set<std::string> seen;

  take(j, seen, "model", c.model);
  take(j, seen, "seed", c.seed);
  take(j, seen, "n_traj", c.n_traj);
  take(j, seen, "dt", c.dt);
  take(j, seen, "blocks", c.blocks);
  take(j, seen, "rate_cap", c.rate_cap);
  take(j, seen, "u", c.u);
  take(j, seen, "v", c.v);
  take(j, seen, "du", c.du);
  take(j, seen, "mgf_rel_tol", c.mgf_rel_tol);
  take(j, seen, "panels", c.panels);
  take(j, seen, "points_per_panel", c.points_per_panel);
  take(j, seen, "bins", c.bins);
  take(j, seen, "min_count", c.min_count);
  take(j, seen, "z_tol", c.z_tol);
  take(j, seen, "ift_tol", c.ift_tol);
  take(j, seen, "fdr_tol", c.fdr_tol);
  take(j, seen, "sym_tol", c.sym_tol);
  take(j, seen, "slow_rel_tol", c.slow_rel_tol);
  take(j, seen, "tur_bound", c.tur_bound);
  take(j, seen, "n_teq", c.n_teq);
  take(j, seen, "n_tc", c.n_tc);
  take(j, seen, "teq_min", c.teq_min);
  take(j, seen, "teq_max", c.teq_max);
  take(j, seen, "tc_min", c.tc_min);
  take(j, seen, "tc_max", c.tc_max);
  take(j, seen, "output_dir", c.output_dir);
  take(j, seen, "tag", c.tag);

  if (auto it = j.find("qubit"); it != j.end()) {
    seen.insert("qubit");
    const json& q = *it;
    if (!q.is_object()) throw qjs::ConfigError("'qubit' must be an object");
    std::set<std::string> qs;
    take(q, qs, "omega0", c.qubit.omega0);
    take(q, qs, "Gamma", c.qubit.Gamma);
    take(q, qs, "beta_c", c.qubit.beta_c);
    take(q, qs, "beta_h", c.qubit.beta_h);
    take(q, qs, "tau", c.qubit.tau);
    take(q, qs, "theta_max", c.qubit.theta_max);
    take(q, qs, "amp1", c.qubit.amp1);
    take(q, qs, "amp2", c.qubit.amp2);
    reject_unknown(q, qs, "qubit.");
  }
  if (auto it = j.find("ion"); it != j.end()) {
    seen.insert("ion");
    const json& q = *it;
    if (!q.is_object()) throw qjs::ConfigError("'ion' must be an object");
    std::set<std::string> qs;
    take(q, qs, "omega0", c.ion.omega0);
    take(q, qs, "Gamma", c.ion.Gamma);
    take(q, qs, "Tc", c.ion.Tc);
    take(q, qs, "Th", c.ion.Th);
    take(q, qs, "tau", c.ion.tau);
    take(q, qs, "n_max", c.ion.n_max);
    take(q, qs, "tail_tol", c.ion.tail_tol);
    reject_unknown(q, qs, "ion.");
  }
  if (auto it = j.find("custom"); it != j.end()) {
    seen.insert("custom");
    const json& q = *it;
    if (!q.is_object()) throw qjs::ConfigError("'custom' must be an object");
    std::set<std::string> qs;
    take(q, qs, "hamiltonian", c.custom_hamiltonian);
    take(q, qs, "jumps", c.custom_jumps);
    take(q, qs, "tau", c.custom_tau);
    reject_unknown(q, qs, "custom.");
  }
  reject_unknown(j, seen, "");
}

json canonical_json(const RunConfig& c) {
  json j;
  j["model"] = c.model;
  j["seed"] = c.seed;
  j["n_traj"] = c.n_traj;
  j["dt"] = c.dt;
  j["blocks"] = c.blocks;
  j["rate_cap"] = c.rate_cap;
  j["u"] = c.u;
  j["v"] = c.v;
  j["du"] = c.du;
  j["mgf_rel_tol"] = c.mgf_rel_tol;
  j["panels"] = c.panels;
  j["points_per_panel"] = c.points_per_panel;
  j["bins"] = c.bins;
  j["min_count"] = c.min_count;
  j["z_tol"] = c.z_tol;
  j["ift_tol"] = c.ift_tol;
  j["fdr_tol"] = c.fdr_tol;
  j["sym_tol"] = c.sym_tol;
  j["slow_rel_tol"] = c.slow_rel_tol;
  j["tur_bound"] = c.tur_bound;
  j["n_teq"] = c.n_teq;
  j["n_tc"] = c.n_tc;
  j["teq_min"] = c.teq_min;
  j["teq_max"] = c.teq_max;
  j["tc_min"] = c.tc_min;
  j["tc_max"] = c.tc_max;
  j["tag"] = c.tag;
  j["qubit"] = {{"omega0", c.qubit.omega0},   {"Gamma", c.qubit.Gamma},
                {"beta_c", c.qubit.beta_c},   {"beta_h", c.qubit.beta_h},
                {"tau", c.qubit.tau},         {"theta_max", c.qubit.theta_max},
                {"amp1", c.qubit.amp1},       {"amp2", c.qubit.amp2}};
  j["ion"] = {{"omega0", c.ion.omega0}, {"Gamma", c.ion.Gamma},
              {"Tc", c.ion.Tc},         {"Th", c.ion.Th},
              {"tau", c.ion.tau},       {"n_max", c.ion.n_max},
              {"tail_tol", c.ion.tail_tol}};
  j["custom"] = {{"hamiltonian", c.custom_hamiltonian},
                 {"jumps", c.custom_jumps},
                 {"tau", c.custom_tau}};
  // output_dir intentionally omitted: where artifacts land must not change
  // their bytes or their hash.
  return j;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw qjs::ConfigError("config: " + what);
  };
  require(c.model == "qubit" || c.model == "ion" || c.model == "custom",
          "model must be one of qubit | ion | custom (got '" + c.model + "')");
  require(c.n_traj > 0, "n_traj must be positive");
  require(c.dt > 0, "dt must be positive");
  require(c.blocks >= 2, "blocks must be at least 2");
  require(c.rate_cap > 0, "rate_cap must be positive");
  require(c.du > 0, "du must be positive");
  require(c.mgf_rel_tol > 0, "mgf_rel_tol must be positive");
  require(c.panels > 0 && c.points_per_panel > 0,
          "quadrature panels and points must be positive");
  require(c.bins >= 2, "bins must be at least 2");
  require(c.min_count >= 1, "min_count must be at least 1");
  require(c.z_tol > 0, "z_tol must be positive");
  require(c.ift_tol > 0 && c.fdr_tol > 0 && c.sym_tol > 0,
          "check tolerances must be positive");
  require(c.slow_rel_tol > 0, "slow_rel_tol must be positive");
  require(c.n_teq >= 1 && c.n_tc >= 1, "sweep grid must be at least 1x1");
  require(c.teq_min > 0 && c.teq_min <= c.teq_max,
          "sweep requires 0 < teq_min <= teq_max");
  require(c.tc_min > 0 && c.tc_min <= c.tc_max,
          "sweep requires 0 < tc_min <= tc_max");
  if (c.model == "qubit") {
    require(c.qubit.tau > 0 && c.qubit.Gamma > 0 && c.qubit.omega0 > 0,
            "qubit tau, Gamma, omega0 must be positive");
    require(c.qubit.beta_c > 0 && c.qubit.beta_h > 0,
            "qubit inverse temperatures must be positive");
  } else if (c.model == "ion") {
    require(c.ion.tau > 0 && c.ion.Gamma > 0 && c.ion.omega0 > 0,
            "ion tau, Gamma, omega0 must be positive");
    require(c.ion.Tc > 0 && c.ion.Th > 0, "ion temperatures must be positive");
    require(c.ion.n_max >= 2, "ion n_max must be at least 2");
    require(c.ion.tail_tol > 0, "ion tail_tol must be positive");
  } else {
    require(!c.custom_hamiltonian.empty(),
            "custom model requires custom.hamiltonian");
    require(!c.custom_jumps.empty(),
            "custom model requires at least one entry in custom.jumps");
    require(c.custom_tau > 0, "custom.tau must be positive");
  }
}

qjs::Mat read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qjs::ConfigError("matrix file not readable: " + path);

  // Strip comments, gather whitespace-separated tokens.
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  if (tokens.size() < 2) {
    throw qjs::ConfigError("matrix file " + path +
                           ": missing 'rows cols' header");
  }
  auto parse_int = [&path](const std::string& s) {
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v <= 0) {
      throw qjs::ConfigError("matrix file " + path +
                             ": bad dimension token '" + s + "'");
    }
    return v;
  };
  const int rows = parse_int(tokens[0]);
  const int cols = parse_int(tokens[1]);
  const std::size_t need = 2 + static_cast<std::size_t>(rows) * cols;
  if (tokens.size() != need) {
    throw qjs::ConfigError("matrix file " + path + ": expected " +
                           std::to_string(need - 2) + " entries for " +
                           std::to_string(rows) + "x" + std::to_string(cols) +
                           ", found " + std::to_string(tokens.size() - 2));
  }
  auto parse_entry = [&path](const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
      throw qjs::ConfigError("matrix file " + path + ": entry '" + s +
                             "' is not 're,im'");
    }
    double re = 0, im = 0;
    const char* b1 = s.data();
    const char* e1 = s.data() + comma;
    const char* b2 = s.data() + comma + 1;
    const char* e2 = s.data() + s.size();
    const auto r1 = std::from_chars(b1, e1, re);
    const auto r2 = std::from_chars(b2, e2, im);
    if (r1.ec != std::errc() || r1.ptr != e1 || r2.ec != std::errc() ||
        r2.ptr != e2) {
      throw qjs::ConfigError("matrix file " + path + ": entry '" + s +
                             "' is not 're,im'");
    }
    return qjs::cplx(re, im);
  };
  qjs::Mat m(rows, cols);
  std::size_t k = 2;
  for (int r = 0; r < rows; ++r) {
    for (int col = 0; col < cols; ++col) m(r, col) = parse_entry(tokens[k++]);
  }
  return m;
}

namespace {

qjs::Protocol custom_protocol(const RunConfig& c) {
  qjs::ModelSpec ms;
  ms.H = read_matrix_file(c.custom_hamiltonian);
  if (ms.H.rows() != ms.H.cols()) {
    throw qjs::ConfigError("custom Hamiltonian must be square");
  }
  for (std::size_t i = 0; i < c.custom_jumps.size(); ++i) {
    qjs::JumpOp j;
    j.label = "L" + std::to_string(i);
    j.L = read_matrix_file(c.custom_jumps[i]);
    ms.jumps.push_back(std::move(j));
  }
  ms.validate();

  // Frozen model: compute the stationary state once (fails fast on
  // degenerate or non-faithful generators). pi is constant, so the
  // potential current vanishes identically.
  const qjs::Mat pi = qjs::steady_state(ms).pi;

  const int d = ms.dim();
  qjs::Protocol p;
  p.tau = c.custom_tau;
  p.thermal = false;
  p.name = "custom";
  p.model = [ms](double) { return ms; };
  p.dH = [d](double) { return qjs::Mat::Zero(d, d); };
  p.pi_fn = [pi](double) { return pi; };
  p.phidot_fn = [d](double) { return qjs::Mat::Zero(d, d); };
  return p;
}

}  // namespace

qjs::Protocol build_protocol(const RunConfig& c) {
  if (c.model == "qubit") return qjs::qubit_protocol(c.qubit);
  if (c.model == "ion") return qjs::ion_protocol(c.ion);
  return custom_protocol(c);
}

bool is_thermal(const RunConfig& c) { return c.model != "custom"; }

}  // namespace qjs::cli
