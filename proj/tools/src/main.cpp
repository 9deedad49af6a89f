// SPDX-License-Identifier: Apache-2.0
// qjs: joint statistics of entropy production and non-adiabatic work along
// quantum jump trajectories of slowly driven open quantum systems.
//
// Subcommands: simulate, exact-mgf, slow-cgf, check-ft, check-dft, fdr,
// tur, fig1, cross-check. Configuration comes from an optional JSON file
// (--config) whose keys are mirrored by flags (flag wins). Artifacts are a
// JSON report (every number tagged with route + tolerance) and CSV tables,
// written under --output-dir / $QJS_OUTPUT_DIR; identical (config, seed)
// runs produce byte-identical files.
//
// Exit codes: 0 pass, 1 check failed, 2 config error, 3 numeric failure.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qjs/ion.hpp"
#include "qjs/protocol.hpp"
#include "qjs/slow_driving.hpp"
#include "qjs/tilted.hpp"
#include "qjs/trajectory.hpp"
#include "qjs/types.hpp"

#include "report.hpp"
#include "run_config.hpp"

namespace {

using qjs::cli::CsvTable;
using qjs::cli::csv_cell;
using qjs::cli::json;
using qjs::cli::RunConfig;
using qjs::cli::tagged;
using qjs::cli::tagged_count;

constexpr const char* kMc = "trajectories";
constexpr const char* kExact = "exact-mgf";
constexpr const char* kSlow = "slow-driving";
constexpr const char* kClosed = "ion-closed-form";
constexpr const char* kQuad = "protocol-quadrature";

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;

struct Paths {
  std::string json_path, csv_path;
};

Paths artifact_paths(const RunConfig& c, const std::string& command) {
  const std::string dir = qjs::cli::resolve_output_dir(c.output_dir);
  const std::string stem = dir + "/" + c.tag + "_" + command;
  return {stem + ".json", stem + ".csv"};
}

json make_report(const RunConfig& c, const std::string& command) {
  json r;
  r["command"] = command;
  r["model"] = c.model;
  r["reproducibility"] =
      qjs::cli::reproducibility_block(qjs::cli::canonical_json(c), c.seed);
  return r;
}

qjs::SamplerOptions sampler_options(const RunConfig& c) {
  qjs::SamplerOptions o;
  o.n_traj = c.n_traj;
  o.dt = c.dt;
  o.seed = c.seed;
  o.rate_cap = c.rate_cap;
  return o;
}

qjs::TiltOptions tilt_options(const RunConfig& c) {
  qjs::TiltOptions o;
  o.rel_tol = c.mgf_rel_tol;
  return o;
}

qjs::SlowOptions slow_options(const RunConfig& c, bool doubling = true) {
  qjs::SlowOptions o;
  o.panels = c.panels;
  o.points_per_panel = c.points_per_panel;
  o.check_doubling = doubling;
  return o;
}

// Tag helpers bound to one route.
json mc_val(const qjs::MeanSE& m) { return tagged(m.value, kMc, "se", m.se); }

void finish(const json& report, const Paths& paths, const CsvTable* table) {
  qjs::cli::write_json(paths.json_path, report);
  std::printf("wrote %s\n", paths.json_path.c_str());
  if (table) {
    qjs::cli::write_csv(paths.csv_path, *table);
    std::printf("wrote %s\n", paths.csv_path.c_str());
  }
}

// ---- simulate ---------------------------------------------------------------

int cmd_simulate(const RunConfig& c) {
  const qjs::Protocol p = qjs::cli::build_protocol(c);
  const qjs::Ensemble e = qjs::sample_ensemble(p, sampler_options(c));
  const qjs::EnsembleStats s = qjs::ensemble_stats(e, c.blocks);

  json r = make_report(c, "simulate");
  json res;
  res["mean_sigma"] = mc_val(s.mean_sigma);
  res["var_sigma"] = mc_val(s.var_sigma);
  res["mean_wtilde"] = mc_val(s.mean_wtilde);
  res["cov_wtilde_sigma"] = mc_val(s.cov_wtilde_sigma);
  res["exp_minus_sigma"] = mc_val(s.exp_minus_sigma);
  if (e.thermal) {
    res["mean_w"] = mc_val(s.mean_w);
    res["var_w"] = mc_val(s.var_w);
    res["adiabatic_work"] = tagged(e.adiabatic_work, kQuad, "abs", 1e-10);
    res["delta_F"] = tagged(e.dF, kQuad, "none", 0);
  }
  res["mean_jumps"] = tagged(s.mean_jumps, kMc, "none", 0);
  res["n_traj"] = tagged_count(s.n_traj, kMc);
  res["n_steps"] = tagged_count(e.n_steps, kMc);
  res["max_step_rate"] = tagged(e.max_step_rate, kMc, "abs", c.rate_cap);
  r["results"] = res;

  CsvTable t;
  t.header = {"sigma", "w", "wtilde", "jumps"};
  t.rows.reserve(e.samples.size());
  for (const auto& x : e.samples) {
    t.rows.push_back({csv_cell(x.sigma), csv_cell(x.w), csv_cell(x.wtilde),
                      csv_cell(static_cast<std::int64_t>(x.jumps))});
  }
  finish(r, artifact_paths(c, "simulate"), &t);
  std::printf("simulate: n=%ld  <sigma>=%.6g (se %.2g)  <e^-sigma>=%.6g\n",
              static_cast<long>(s.n_traj), s.mean_sigma.value,
              s.mean_sigma.se, s.exp_minus_sigma.value);
  return kExitPass;
}

// ---- exact-mgf --------------------------------------------------------------

int cmd_exact_mgf(const RunConfig& c) {
  const qjs::Protocol p = qjs::cli::build_protocol(c);
  const qjs::TiltOptions to = tilt_options(c);

  json r = make_report(c, "exact-mgf");
  json res;
  CsvTable t;
  if (p.thermal) {
    const qjs::MgfValue g = qjs::exact_mgf(p, c.u, c.v, to);
    const qjs::ExactCumulants ex = qjs::cumulants_from_mgf(p, c.du, -1.0, to);
    res["G"] = tagged(g.g, kExact, "abs", g.est_err);
    res["K"] = tagged(g.log_g, kExact, "abs",
                      g.est_err / std::max(std::abs(g.g), 1e-300));
    res["steps"] = tagged_count(g.steps, kExact);
    res["mean_sigma"] = tagged(ex.mean_sigma, kExact, "stencil", ex.du);
    res["var_sigma"] = tagged(ex.var_sigma, kExact, "stencil", ex.du);
    res["mean_wtilde"] = tagged(ex.mean_wtilde, kExact, "stencil", ex.dv);
    res["var_wtilde"] = tagged(ex.var_wtilde, kExact, "stencil", ex.dv);
    res["cov_wtilde_sigma"] = tagged(ex.cov_wtilde_sigma, kExact, "stencil",
                                     std::max(ex.du, ex.dv));
    res["mean_w"] = tagged(ex.mean_w, kExact, "stencil", ex.dv);
    res["var_w"] = tagged(ex.var_w, kExact, "stencil", ex.dv);
    res["ift_gap"] = tagged(ex.ift_gap, kExact, "abs", c.ift_tol);
    t.header = {"u", "v", "G", "K", "mean_sigma", "var_sigma", "mean_wtilde",
                "var_wtilde", "mean_w", "var_w", "ift_gap"};
    t.rows.push_back({csv_cell(c.u), csv_cell(c.v), csv_cell(g.g),
                      csv_cell(g.log_g), csv_cell(ex.mean_sigma),
                      csv_cell(ex.var_sigma), csv_cell(ex.mean_wtilde),
                      csv_cell(ex.var_wtilde), csv_cell(ex.mean_w),
                      csv_cell(ex.var_w), csv_cell(ex.ift_gap)});
    std::printf("exact-mgf: G(%g,%g)=%.12g  <sigma>=%.6g  var(sigma)=%.6g\n",
                c.u, c.v, g.g, ex.mean_sigma, ex.var_sigma);
  } else {
    const qjs::MgfValue g = qjs::exact_mgf_entropy(p, c.u, to);
    const qjs::ExactSigmaCumulants ex =
        qjs::sigma_cumulants_from_mgf(p, c.du, to);
    res["G"] = tagged(g.g, kExact, "abs", g.est_err);
    res["K"] = tagged(g.log_g, kExact, "abs",
                      g.est_err / std::max(std::abs(g.g), 1e-300));
    res["steps"] = tagged_count(g.steps, kExact);
    res["mean_sigma"] = tagged(ex.mean_sigma, kExact, "stencil", c.du);
    res["var_sigma"] = tagged(ex.var_sigma, kExact, "stencil", c.du);
    res["ift_gap"] = tagged(ex.ift_gap, kExact, "abs", c.ift_tol);
    t.header = {"u", "G", "K", "mean_sigma", "var_sigma", "ift_gap"};
    t.rows.push_back({csv_cell(c.u), csv_cell(g.g), csv_cell(g.log_g),
                      csv_cell(ex.mean_sigma), csv_cell(ex.var_sigma),
                      csv_cell(ex.ift_gap)});
    std::printf("exact-mgf: G(%g)=%.12g  <sigma>=%.6g  var(sigma)=%.6g\n",
                c.u, g.g, ex.mean_sigma, ex.var_sigma);
  }
  r["results"] = res;
  finish(r, artifact_paths(c, "exact-mgf"), &t);
  return kExitPass;
}

// ---- slow-cgf ---------------------------------------------------------------

int cmd_slow_cgf(const RunConfig& c) {
  const qjs::Protocol p = qjs::cli::build_protocol(c);
  const qjs::SlowOptions so = slow_options(c);
  const qjs::CumulantReport cr = qjs::cumulants_slow(p, so);

  json r = make_report(c, "slow-cgf");
  json res;
  double k = 0, k_sym = 0;
  if (p.thermal) {
    k = qjs::cgf_joint_slow(p, c.u, c.v, so);
    k_sym = qjs::cgf_joint_slow(p, 1.0 - c.u, -c.v, so);
  } else {
    k = qjs::cgf_entropy_slow(p, c.u, so);
    k_sym = qjs::cgf_entropy_slow(p, 1.0 - c.u, so);
  }
  const double sym_residual = std::abs(k - k_sym);
  res["K"] = tagged(k, kSlow, "abs", cr.quad_delta);
  res["symmetry_residual"] = tagged(sym_residual, kSlow, "abs", c.sym_tol);
  res["mean_sigma"] = tagged(cr.mean_sigma, kSlow, "abs", cr.quad_delta);
  res["var_sigma"] = tagged(cr.var_sigma, kSlow, "abs", cr.quad_delta);
  res["dI_sigma"] = tagged(cr.dI_sigma, kSlow, "abs", cr.quad_delta);
  if (p.thermal) {
    res["adiabatic_work"] = tagged(cr.adiabatic_work, kQuad, "abs", 1e-10);
    res["delta_F"] = tagged(cr.dF, kQuad, "none", 0);
    res["mean_w"] = tagged(cr.mean_w, kSlow, "abs", cr.quad_delta);
    res["var_w"] = tagged(cr.var_w, kSlow, "abs", cr.quad_delta);
    res["dI_w"] = tagged(cr.dI_w, kSlow, "abs", cr.quad_delta);
    res["tur_ratio"] = tagged(cr.tur_ratio, kSlow, "none", 0);
  }
  res["fdr_gap"] = tagged(cr.fdr_gap, kSlow, "abs", cr.quad_delta);
  res["fdr_residual"] = tagged(cr.fdr_residual, kSlow, "abs", c.fdr_tol);
  r["results"] = res;

  CsvTable t;
  t.header = {"u", "v", "K", "symmetry_residual", "mean_sigma", "var_sigma",
              "dI_sigma", "mean_w", "var_w", "tur_ratio", "fdr_gap"};
  t.rows.push_back({csv_cell(c.u), csv_cell(c.v), csv_cell(k),
                    csv_cell(sym_residual), csv_cell(cr.mean_sigma),
                    csv_cell(cr.var_sigma), csv_cell(cr.dI_sigma),
                    csv_cell(cr.mean_w), csv_cell(cr.var_w),
                    csv_cell(cr.tur_ratio), csv_cell(cr.fdr_gap)});
  finish(r, artifact_paths(c, "slow-cgf"), &t);
  std::printf(
      "slow-cgf: K(%g,%g)=%.12g  |K(u,v)-K(1-u,-v)|=%.3g  <sigma>=%.6g\n",
      c.u, c.v, k, sym_residual, cr.mean_sigma);
  return kExitPass;
}

// ---- check-ft ---------------------------------------------------------------

int cmd_check_ft(const RunConfig& c) {
  const qjs::Protocol p = qjs::cli::build_protocol(c);

  const qjs::Ensemble e = qjs::sample_ensemble(p, sampler_options(c));
  const qjs::EnsembleStats s = qjs::ensemble_stats(e, c.blocks);
  const double mc_dev = std::abs(s.exp_minus_sigma.value - 1.0);
  const double mc_gate = c.z_tol * s.exp_minus_sigma.se;
  const bool mc_pass = mc_dev <= mc_gate;

  const qjs::TiltOptions to = tilt_options(c);
  const qjs::MgfValue g = p.thermal ? qjs::exact_mgf(p, 1.0, 0.0, to)
                                    : qjs::exact_mgf_entropy(p, 1.0, to);
  const double exact_gap = std::abs(g.g - 1.0);
  const bool exact_pass = exact_gap <= c.ift_tol;

  json r = make_report(c, "check-ft");
  json res;
  res["exp_minus_sigma"] = mc_val(s.exp_minus_sigma);
  res["mc_deviation"] = tagged(mc_dev, kMc, "se", s.exp_minus_sigma.se);
  res["mc_gate"] = tagged(mc_gate, kMc, "none", 0);
  res["mc_pass"] = mc_pass;
  res["G_1_0"] = tagged(g.g, kExact, "abs", g.est_err);
  res["exact_gap"] = tagged(exact_gap, kExact, "abs", c.ift_tol);
  res["exact_pass"] = exact_pass;
  res["pass"] = mc_pass && exact_pass;
  r["results"] = res;

  CsvTable t;
  t.header = {"route", "value", "deviation", "gate", "pass"};
  t.rows.push_back({kMc, csv_cell(s.exp_minus_sigma.value), csv_cell(mc_dev),
                    csv_cell(mc_gate), mc_pass ? "1" : "0"});
  t.rows.push_back({kExact, csv_cell(g.g), csv_cell(exact_gap),
                    csv_cell(c.ift_tol), exact_pass ? "1" : "0"});
  finish(r, artifact_paths(c, "check-ft"), &t);
  std::printf("check-ft: <e^-sigma>=%.6g+-%.2g (|dev|=%.2g gate %.2g) %s; "
              "G(1,0)-1=%.2e (tol %.0e) %s\n",
              s.exp_minus_sigma.value, s.exp_minus_sigma.se, mc_dev, mc_gate,
              mc_pass ? "pass" : "FAIL", g.g - 1.0, c.ift_tol,
              exact_pass ? "pass" : "FAIL");
  return (mc_pass && exact_pass) ? kExitPass : kExitCheckFailed;
}

// ---- check-dft --------------------------------------------------------------

int cmd_check_dft(const RunConfig& c) {
  const qjs::Protocol p = qjs::cli::build_protocol(c);
  qjs::SamplerOptions so = sampler_options(c);
  const qjs::Ensemble fwd = qjs::sample_ensemble(p, so);
  so.seed = c.seed + 1;  // independent stream for the reversed drive
  const qjs::Ensemble rev = qjs::sample_ensemble(qjs::reversed(p), so);

  qjs::DftOptions d;
  d.bins = c.bins;
  d.min_count = c.min_count;
  d.z_tol = c.z_tol;
  const qjs::DftReport rep = p.thermal ? qjs::dft_joint_check(fwd, rev, d)
                                       : qjs::dft_marginal_check(fwd, rev, d);

  json r = make_report(c, "check-dft");
  json res;
  res["n_checked"] = tagged_count(rep.n_checked, kMc);
  res["n_pass"] = tagged_count(rep.n_pass, kMc);
  res["max_abs_z"] = tagged(rep.max_abs_z, kMc, "abs", c.z_tol);
  res["pass"] = rep.pass;
  json bins = json::array();
  for (const auto& b : rep.bins) {
    json jb;
    jb["sigma_center"] = tagged(b.s_center, kMc, "none", 0);
    jb["wtilde_center"] = tagged(b.w_center, kMc, "none", 0);
    jb["n_fwd"] = tagged_count(b.n_fwd, kMc);
    jb["n_rev"] = tagged_count(b.n_rev, kMc);
    jb["lhs"] = tagged(b.lhs, kMc, "se", b.se);
    jb["rhs"] = tagged(b.rhs, kMc, "none", 0);
    jb["z"] = tagged(b.z, kMc, "abs", c.z_tol);
    bins.push_back(jb);
  }
  res["bins"] = bins;
  r["results"] = res;

  CsvTable t;
  t.header = {"sigma_center", "wtilde_center", "n_fwd", "n_rev",
              "lhs",          "rhs",           "se",    "z"};
  for (const auto& b : rep.bins) {
    t.rows.push_back({csv_cell(b.s_center), csv_cell(b.w_center),
                      csv_cell(static_cast<std::int64_t>(b.n_fwd)),
                      csv_cell(static_cast<std::int64_t>(b.n_rev)),
                      csv_cell(b.lhs), csv_cell(b.rhs), csv_cell(b.se),
                      csv_cell(b.z)});
  }
  finish(r, artifact_paths(c, "check-dft"), &t);
  std::printf("check-dft: %d/%d bins within %.1f se, max|z|=%.2f -> %s\n",
              rep.n_pass, rep.n_checked, c.z_tol, rep.max_abs_z,
              rep.pass ? "pass" : "FAIL");
  return rep.pass ? kExitPass : kExitCheckFailed;
}

// ---- fdr --------------------------------------------------------------------

int cmd_fdr(const RunConfig& c) {
  const qjs::Protocol p = qjs::cli::build_protocol(c);
  const qjs::CumulantReport cr = qjs::cumulants_slow(p, slow_options(c));
  const bool pass = std::abs(cr.fdr_residual) <= c.fdr_tol;

  json r = make_report(c, "fdr");
  json res;
  res["mean_sigma"] = tagged(cr.mean_sigma, kSlow, "abs", cr.quad_delta);
  res["var_sigma"] = tagged(cr.var_sigma, kSlow, "abs", cr.quad_delta);
  res["dI_sigma"] = tagged(cr.dI_sigma, kSlow, "abs", cr.quad_delta);
  res["fdr_gap"] = tagged(cr.fdr_gap, kSlow, "abs", cr.quad_delta);
  res["two_dI_sigma"] = tagged(2.0 * cr.dI_sigma, kSlow, "abs",
                               cr.quad_delta);
  res["fdr_residual"] = tagged(cr.fdr_residual, kSlow, "abs", c.fdr_tol);
  res["pass"] = pass;
  r["results"] = res;

  CsvTable t;
  t.header = {"mean_sigma", "var_sigma", "dI_sigma",
              "fdr_gap",    "fdr_residual"};
  t.rows.push_back({csv_cell(cr.mean_sigma), csv_cell(cr.var_sigma),
                    csv_cell(cr.dI_sigma), csv_cell(cr.fdr_gap),
                    csv_cell(cr.fdr_residual)});
  finish(r, artifact_paths(c, "fdr"), &t);
  std::printf("fdr: var(sigma)=%.6g  2(<sigma>+dI)=%.6g  residual=%.2e "
              "(tol %.0e) -> %s\n",
              cr.var_sigma, 2.0 * (cr.mean_sigma + cr.dI_sigma),
              cr.fdr_residual, c.fdr_tol, pass ? "pass" : "FAIL");
  return pass ? kExitPass : kExitCheckFailed;
}

// ---- tur --------------------------------------------------------------------

int cmd_tur(const RunConfig& c) {
  const qjs::Protocol p = qjs::cli::build_protocol(c);
  if (!p.thermal) {
    throw qjs::ConfigError("tur requires a thermal model (work statistics)");
  }
  const qjs::CumulantReport cr = qjs::cumulants_slow(p, slow_options(c));
  const bool pass = cr.tur_ratio >= c.tur_bound - 1e-12;

  json r = make_report(c, "tur");
  json res;
  res["tur_ratio"] = tagged(cr.tur_ratio, kSlow, "abs", cr.quad_delta);
  res["bound"] = tagged(c.tur_bound, kSlow, "none", 0);
  res["mean_sigma"] = tagged(cr.mean_sigma, kSlow, "abs", cr.quad_delta);
  res["var_w"] = tagged(cr.var_w, kSlow, "abs", cr.quad_delta);
  res["mean_w_excess"] = tagged(cr.mean_w - cr.adiabatic_work, kSlow, "abs",
                                cr.quad_delta);
  res["pass"] = pass;
  r["results"] = res;

  CsvTable t;
  t.header = {"tur_ratio", "bound", "mean_sigma", "var_w", "mean_w_excess"};
  t.rows.push_back({csv_cell(cr.tur_ratio), csv_cell(c.tur_bound),
                    csv_cell(cr.mean_sigma), csv_cell(cr.var_w),
                    csv_cell(cr.mean_w - cr.adiabatic_work)});
  finish(r, artifact_paths(c, "tur"), &t);
  std::printf("tur: ratio=%.6g (bound %g) -> %s\n", cr.tur_ratio, c.tur_bound,
              pass ? "pass" : "FAIL");
  return pass ? kExitPass : kExitCheckFailed;
}

// ---- fig1 -------------------------------------------------------------------

int cmd_fig1(const RunConfig& c) {
  // The trade-off sweep is defined on the ion family; the ion config block
  // provides the base parameters regardless of the `model` selection.
  const std::vector<qjs::Fig1Row> rows =
      qjs::fig1_sweep(c.ion, c.n_teq, c.n_tc, c.teq_min, c.teq_max, c.tc_min,
                      c.tc_max);

  double min_tur = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    min_tur = std::min(min_tur, row.tur_ratio);
    min_gap = std::min(min_gap, row.fdr_gap);
  }
  const bool pass = min_tur >= c.tur_bound - 1e-12 && min_gap >= -1e-12;

  json r = make_report(c, "fig1");
  json res;
  res["n_rows"] = tagged_count(static_cast<std::int64_t>(rows.size()),
                               kClosed);
  res["min_tur_ratio"] = tagged(min_tur, kClosed, "none", 0);
  res["min_fdr_gap"] = tagged(min_gap, kClosed, "none", 0);
  res["tur_bound"] = tagged(c.tur_bound, kClosed, "none", 0);
  res["pass"] = pass;
  r["results"] = res;

  CsvTable t;
  t.header = {"t_eq",  "T_c",        "tur_ratio",  "fdr_gap",       "mean_w",
              "var_w", "mean_sigma", "var_sigma",  "adiabatic_work"};
  t.rows.reserve(rows.size());
  for (const auto& row : rows) {
    t.rows.push_back({csv_cell(row.t_eq), csv_cell(row.Tc),
                      csv_cell(row.tur_ratio), csv_cell(row.fdr_gap),
                      csv_cell(row.mean_w), csv_cell(row.var_w),
                      csv_cell(row.mean_sigma), csv_cell(row.var_sigma),
                      csv_cell(row.adiabatic_work)});
  }
  finish(r, artifact_paths(c, "fig1"), &t);
  std::printf("fig1: %zu rows  min tur=%.4f  min fdr_gap=%.3e -> %s\n",
              rows.size(), min_tur, min_gap, pass ? "pass" : "FAIL");
  return pass ? kExitPass : kExitCheckFailed;
}

// ---- cross-check ------------------------------------------------------------

struct CrossRow {
  std::string quantity;
  qjs::MeanSE mc;
  double exact = 0;
  double slow = 0;
  bool has_closed = false;
  double closed = 0;
};

int cmd_cross_check(const RunConfig& c) {
  const qjs::Protocol p = qjs::cli::build_protocol(c);

  const qjs::Ensemble e = qjs::sample_ensemble(p, sampler_options(c));
  const qjs::EnsembleStats s = qjs::ensemble_stats(e, c.blocks);
  const qjs::CumulantReport cr = qjs::cumulants_slow(p, slow_options(c));

  std::vector<CrossRow> rows;
  if (p.thermal) {
    const qjs::ExactCumulants ex =
        qjs::cumulants_from_mgf(p, c.du, -1.0, tilt_options(c));
    rows = {{"mean_sigma", s.mean_sigma, ex.mean_sigma, cr.mean_sigma},
            {"var_sigma", s.var_sigma, ex.var_sigma, cr.var_sigma},
            {"mean_wtilde", s.mean_wtilde, ex.mean_wtilde,
             cr.mean_w - cr.adiabatic_work},
            {"var_w", s.var_w, ex.var_w, cr.var_w}};
    if (c.model == "ion") {
      const qjs::IonClosedForm cf = qjs::ion_closed_form(c.ion);
      rows[0].has_closed = true;
      rows[0].closed = cf.mean_sigma;
      rows[1].has_closed = true;
      rows[1].closed = cf.var_sigma;
      rows[2].has_closed = true;
      rows[2].closed = cf.mean_w_excess;
      rows[3].has_closed = true;
      rows[3].closed = cf.var_w;
    }
  } else {
    const qjs::ExactSigmaCumulants ex =
        qjs::sigma_cumulants_from_mgf(p, c.du, tilt_options(c));
    rows = {{"mean_sigma", s.mean_sigma, ex.mean_sigma, cr.mean_sigma},
            {"var_sigma", s.var_sigma, ex.var_sigma, cr.var_sigma}};
  }

  json r = make_report(c, "cross-check");
  json table = json::array();
  CsvTable t;
  t.header = {"quantity", "mc",          "mc_se", "exact", "slow",
              "closed",   "max_rel_dev", "pass"};
  bool all_pass = true;
  for (const auto& row : rows) {
    const double scale = std::max(std::abs(row.exact), 1e-12);
    double max_dev = std::max(std::abs(row.mc.value - row.exact),
                              std::abs(row.slow - row.exact));
    if (row.has_closed) {
      max_dev = std::max(max_dev, std::abs(row.closed - row.exact));
    }
    const double max_rel_dev = max_dev / scale;
    const bool mc_ok =
        std::abs(row.mc.value - row.exact) <= c.z_tol * row.mc.se;
    const bool slow_ok =
        std::abs(row.slow - row.exact) <= c.slow_rel_tol * scale;
    const bool closed_ok =
        !row.has_closed ||
        std::abs(row.closed - row.exact) <= c.slow_rel_tol * scale;
    const bool pass = mc_ok && slow_ok && closed_ok;
    all_pass = all_pass && pass;

    json jr;
    jr["quantity"] = row.quantity;
    jr["mc"] = mc_val(row.mc);
    jr["exact"] = tagged(row.exact, kExact, "stencil", c.du);
    jr["slow"] = tagged(row.slow, kSlow, "rel", c.slow_rel_tol);
    if (row.has_closed) {
      jr["closed_form"] = tagged(row.closed, kClosed, "rel", c.slow_rel_tol);
    }
    jr["max_rel_dev"] = tagged(max_rel_dev, "cross-check", "none", 0);
    jr["pass"] = pass;
    table.push_back(jr);

    t.rows.push_back({row.quantity, csv_cell(row.mc.value),
                      csv_cell(row.mc.se), csv_cell(row.exact),
                      csv_cell(row.slow),
                      row.has_closed ? csv_cell(row.closed) : std::string(),
                      csv_cell(max_rel_dev), pass ? "1" : "0"});
    std::string closed_str;
    if (row.has_closed) {
      char buf[40];
      std::snprintf(buf, sizeof buf, " closed=%.6g", row.closed);
      closed_str = buf;
    }
    std::printf("cross-check %-12s mc=%.6g+-%.2g exact=%.6g slow=%.6g%s "
                "max_rel_dev=%.3g %s\n",
                row.quantity.c_str(), row.mc.value, row.mc.se, row.exact,
                row.slow, closed_str.c_str(), max_rel_dev,
                pass ? "pass" : "FAIL");
  }
  json res;
  res["table"] = table;
  res["pass"] = all_pass;
  r["results"] = res;
  finish(r, artifact_paths(c, "cross-check"), &t);
  std::printf("cross-check: %s\n", all_pass ? "pass" : "FAIL");
  return all_pass ? kExitPass : kExitCheckFailed;
}

// ---- option wiring ----------------------------------------------------------

void add_flags(CLI::App& app, RunConfig& c) {
  app.add_option("--model", c.model, "model: qubit | ion | custom");
  app.add_option("--seed", c.seed, "RNG seed");
  app.add_option("--n-traj", c.n_traj, "trajectories to sample");
  app.add_option("--dt", c.dt, "sampler time step");
  app.add_option("--blocks", c.blocks, "jackknife blocks");
  app.add_option("--rate-cap", c.rate_cap, "max dt * mean jump rate");
  app.add_option("--u", c.u, "entropy counting field");
  app.add_option("--v", c.v, "work counting field");
  app.add_option("--du", c.du, "finite-difference stencil step");
  app.add_option("--mgf-rel-tol", c.mgf_rel_tol, "product-integral target");
  app.add_option("--panels", c.panels, "slow-route quadrature panels");
  app.add_option("--points-per-panel", c.points_per_panel,
                 "Gauss-Legendre points per panel");
  app.add_option("--bins", c.bins, "DFT histogram bins per axis");
  app.add_option("--min-count", c.min_count, "min bin count to test");
  app.add_option("--z-tol", c.z_tol, "MC gate in standard errors");
  app.add_option("--ift-tol", c.ift_tol, "exact-route |G(1,0)-1| gate");
  app.add_option("--fdr-tol", c.fdr_tol, "FDR residual gate");
  app.add_option("--sym-tol", c.sym_tol, "CGF symmetry gate");
  app.add_option("--slow-rel-tol", c.slow_rel_tol,
                 "cross-check slow-route relative gate");
  app.add_option("--tur-bound", c.tur_bound, "TUR lower bound");
  app.add_option("--n-teq", c.n_teq, "fig1 grid points in t_eq");
  app.add_option("--n-tc", c.n_tc, "fig1 grid points in T_c");
  app.add_option("--teq-min", c.teq_min, "fig1 t_eq lower edge");
  app.add_option("--teq-max", c.teq_max, "fig1 t_eq upper edge");
  app.add_option("--tc-min", c.tc_min, "fig1 T_c lower edge");
  app.add_option("--tc-max", c.tc_max, "fig1 T_c upper edge");
  app.add_option("--output-dir", c.output_dir,
                 "artifact directory (default $QJS_OUTPUT_DIR or '.')");
  app.add_option("--tag", c.tag, "artifact filename prefix");

  app.add_option("--qubit-omega0", c.qubit.omega0, "qubit base frequency");
  app.add_option("--qubit-gamma", c.qubit.Gamma, "qubit damping rate");
  app.add_option("--qubit-beta-c", c.qubit.beta_c, "qubit endpoint beta");
  app.add_option("--qubit-beta-h", c.qubit.beta_h, "qubit midpoint beta");
  app.add_option("--qubit-tau", c.qubit.tau, "qubit protocol duration");
  app.add_option("--qubit-theta-max", c.qubit.theta_max,
                 "qubit eigenbasis rotation amplitude");
  app.add_option("--qubit-amp1", c.qubit.amp1, "qubit omega modulation 1");
  app.add_option("--qubit-amp2", c.qubit.amp2, "qubit omega modulation 2");

  app.add_option("--ion-omega0", c.ion.omega0, "ion base frequency");
  app.add_option("--ion-gamma", c.ion.Gamma, "ion damping rate");
  app.add_option("--ion-tc", c.ion.Tc, "ion endpoint temperature");
  app.add_option("--ion-th", c.ion.Th, "ion midpoint temperature");
  app.add_option("--ion-tau", c.ion.tau, "ion protocol duration");
  app.add_option("--ion-n-max", c.ion.n_max, "ion ladder truncation");
  app.add_option("--ion-tail-tol", c.ion.tail_tol,
                 "max thermal weight on the top level");

  app.add_option("--custom-hamiltonian", c.custom_hamiltonian,
                 "path to the Hamiltonian matrix file");
  app.add_option("--custom-jumps", c.custom_jumps,
                 "paths to jump operator matrix files");
  app.add_option("--custom-tau", c.custom_tau, "custom protocol duration");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qjs: entropy production and non-adiabatic work statistics along "
      "quantum jump trajectories (trajectory MC, exact tilted propagator, "
      "and slow-driving routes)"};
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override)");

  // Load the config file before binding flag overrides: scan argv directly
  // so file values become the defaults CLI11 overrides.
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (a == "--config" && i + 1 < argc) {
        qjs::cli::apply_config_file(argv[i + 1], cfg);
        break;
      }
      if (a.rfind("--config=", 0) == 0) {
        qjs::cli::apply_config_file(a.substr(9), cfg);
        break;
      }
    }
  } catch (const qjs::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  add_flags(app, cfg);

  CLI::App* sub_simulate = app.add_subcommand(
      "simulate", "sample quantum jump trajectories; raw samples + stats");
  CLI::App* sub_mgf = app.add_subcommand(
      "exact-mgf", "tilted-propagator generating function and cumulants");
  CLI::App* sub_slow = app.add_subcommand(
      "slow-cgf", "slow-driving cumulant generating function and cumulants");
  CLI::App* sub_ft = app.add_subcommand(
      "check-ft", "integral fluctuation theorem check (MC + exact)");
  CLI::App* sub_dft = app.add_subcommand(
      "check-dft", "joint detailed fluctuation theorem check (MC)");
  CLI::App* sub_fdr = app.add_subcommand(
      "fdr", "fluctuation-dissipation relation report (slow route)");
  CLI::App* sub_tur = app.add_subcommand(
      "tur", "thermodynamic uncertainty ratio report (slow route)");
  CLI::App* sub_fig1 = app.add_subcommand(
      "fig1", "ion trade-off sweep over (t_eq, T_c), closed forms");
  CLI::App* sub_cross = app.add_subcommand(
      "cross-check", "three-route cumulant comparison with gates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    qjs::cli::validate(cfg);
    if (sub_simulate->parsed()) return cmd_simulate(cfg);
    if (sub_mgf->parsed()) return cmd_exact_mgf(cfg);
    if (sub_slow->parsed()) return cmd_slow_cgf(cfg);
    if (sub_ft->parsed()) return cmd_check_ft(cfg);
    if (sub_dft->parsed()) return cmd_check_dft(cfg);
    if (sub_fdr->parsed()) return cmd_fdr(cfg);
    if (sub_tur->parsed()) return cmd_tur(cfg);
    if (sub_fig1->parsed()) return cmd_fig1(cfg);
    if (sub_cross->parsed()) return cmd_cross_check(cfg);
    std::fprintf(stderr, "no subcommand selected\n");
    return 2;
  } catch (const qjs::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qjs::Error& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
