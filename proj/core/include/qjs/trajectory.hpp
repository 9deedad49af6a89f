// SPDX-License-Identifier: Apache-2.0
// Quantum-jump (MCWF) trajectory sampler with two-point boundary
// measurements, per-trajectory entropy-production / work bookkeeping, and
// jackknife estimators plus fluctuation-relation checks on the resulting
// ensembles.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qjs/protocol.hpp"
#include "qjs/rng.hpp"

namespace qjs {

// Complex operator stored by (diagonal offset, band) pairs. The built-in
// models are banded in their representation basis (at most a handful of
// offsets), which makes a step O(dim * n_bands) instead of O(dim^2).
struct DiagOp {
  int dim = 0;
  std::vector<int> offsets;        // k: couples |j> -> |j+k>
  std::vector<Vec> bands;          // band for offset k has dim-|k| entries
  static DiagOp compile(const Mat& a, double drop_tol = 1e-14);
  void apply(const Vec& in, Vec& out) const;  // out = A in
  Mat dense() const;
};

struct SamplerOptions {
  long n_traj = 10000;
  double dt = 1e-2;
  std::uint64_t seed = 20260813;
  // Gate: dt * max_t sum_x tr[Lx^dag Lx pi(t)] must stay below this.
  double rate_cap = 0.05;
  double norm_floor = 1e-12;   // collapse guard on the unnormalised state
  long progress_every = 0;     // 0 = silent; else print every N trajectories
};

// One trajectory's accumulated counters.
struct JointSample {
  double sigma = 0.0;    // ln p_mu - ln p_nu - sum_n dphi_n
  double w = 0.0;        // e_nu - e_mu - sum_n de_n   (thermal paths only)
  double wtilde = 0.0;   // w - W_adiabatic
  std::uint32_t jumps = 0;
};

struct Ensemble {
  std::vector<JointSample> samples;
  bool thermal = true;
  double adiabatic_work = 0.0;  // W = int tr[dH pi] dt
  double dF = 0.0;              // equilibrium free-energy difference
  double dt = 0.0;
  long n_steps = 0;             // per trajectory
  double max_step_rate = 0.0;   // max_t dt * mean jump rate (gate value)
};

Ensemble sample_ensemble(const Protocol& p, const SamplerOptions& opt);

// ---- estimators -------------------------------------------------------------

struct MeanSE {
  double value = 0.0;
  double se = 0.0;
};

// Delete-one-block jackknife for a plain mean and for the (biased-corrected)
// variance of the per-trajectory values.
MeanSE jackknife_mean(const std::vector<double>& x, int blocks = 20);
MeanSE jackknife_var(const std::vector<double>& x, int blocks = 20);
MeanSE jackknife_cov(const std::vector<double>& x, const std::vector<double>& y,
                     int blocks = 20);

struct EnsembleStats {
  MeanSE mean_sigma, var_sigma;
  MeanSE mean_w, var_w;          // thermal only (zeros otherwise)
  MeanSE mean_wtilde, cov_wtilde_sigma;
  MeanSE exp_minus_sigma;        // integral fluctuation theorem estimator
  double mean_jumps = 0.0;
  long n_traj = 0;
};
EnsembleStats ensemble_stats(const Ensemble& e, int blocks = 20);

// ---- fluctuation-relation checks --------------------------------------------

struct DftOptions {
  int bins = 12;            // per axis, grid symmetric about 0
  long min_count = 100;     // only test bins populated on both sides
  double z_tol = 3.0;       // pass if |lhs - rhs| <= z_tol * se
  double range_sigmas = 4.0;  // half-range in units of max std-dev
};

struct DftBin {
  double s_center = 0.0, w_center = 0.0;
  long n_fwd = 0, n_rev = 0;   // rev counted in the mirrored bin
  double lhs = 0.0;            // ln[ P_fwd(bin) / P_rev(mirror) ]
  double rhs = 0.0;            // sigma at the bin centre
  double se = 0.0;             // binomial standard error of lhs
  double z = 0.0;
};

struct DftReport {
  std::vector<DftBin> bins;
  int n_checked = 0, n_pass = 0;
  double max_abs_z = 0.0;
  bool pass = false;
};

// Joint detailed fluctuation theorem p(wt, s) / p~(-wt, -s) = e^s between a
// forward ensemble and one sampled from `reversed(p)`.
DftReport dft_joint_check(const Ensemble& fwd, const Ensemble& rev,
                          const DftOptions& opt = {});
// Marginal version in sigma alone.
DftReport dft_marginal_check(const Ensemble& fwd, const Ensemble& rev,
                             const DftOptions& opt = {});

}  // namespace qjs
