// SPDX-License-Identifier: Apache-2.0
// Exact counting statistics: the generating function of the joint
// (entropy production, excess work) distribution as the trace of a
// tilted-generator product integral, plus finite-difference cumulants.
#pragma once

#include "qjs/operator_core.hpp"
#include "qjs/protocol.hpp"

namespace qjs {

struct TiltOptions {
  double rel_tol = 1e-9;      // step-doubling target on the final trace
  int init_steps = 64;
  int max_doublings = 12;
  double krylov_tol = 1e-12;  // per-step action tolerance (large dims)
  int dense_dim_max = 8;      // dim <= this: exponentiate the superoperator
};

struct MgfValue {
  double u = 0.0, v = 0.0;
  double g = 0.0;        // G(u,v) = < exp(-u sigma - v wtilde) >
  double log_g = 0.0;    // K(u,v)
  double est_err = 0.0;  // |last doubling change|
  long steps = 0;
};

// Tilt operator Ups(t): G is recovered with no boundary weights and no
// prefactor because the operators are centred on the instantaneous steady
// state. `h`, `dh` are the physical Hamiltonian and its time derivative in
// the current representation; `pi` the instantaneous thermal state.
Mat joint_tilt(const Mat& h, const Mat& dh, const Mat& pi, double beta,
               double dbeta, double u, double v);

// Marginal (entropy-only) tilt for privileged non-thermal models:
// Ups(u) = -int_0^{u/2} ds pi^s dPhi pi^-s, dPhi the centred potential
// current. Coincides with joint_tilt(.,.,.,beta,dbeta,u,0) on thermal
// families.
Mat entropy_tilt(const Mat& pi, const Mat& phidot, double u);

MgfValue exact_mgf(const Protocol& p, double u, double v,
                   const TiltOptions& o = {});
MgfValue exact_mgf_entropy(const Protocol& p, double u,
                           const TiltOptions& o = {});

// |K(u,v) - K(1-u,-v)|: exact finite-time value; decays ~ 1/tau on
// stationary-endpoint protocols as the slow-driving symmetry emerges.
double cgf_symmetry_residual(const Protocol& p, double u, double v,
                             const TiltOptions& o = {});

struct ExactCumulants {
  double mean_sigma = 0, var_sigma = 0;
  double mean_wtilde = 0, var_wtilde = 0, cov_wtilde_sigma = 0;
  double mean_w = 0, var_w = 0;  // shifted by the adiabatic work
  double ift_gap = 0;            // |G(1,0) - 1|
  double du = 0, dv = 0;
  bool has_cov = true;  // false when the cross stencil was skipped
};

// Richardson-extrapolated central differences of K on a 17-point stencil.
// dv < 0 selects dv = du / (time-averaged beta).  with_cov = false skips the
// eight cross-stencil points (cov_wtilde_sigma is then zero and has_cov is
// false); the marginal cumulants only need the two one-dimensional stencils.
ExactCumulants cumulants_from_mgf(const Protocol& p, double du = 0.02,
                                  double dv = -1.0, const TiltOptions& o = {},
                                  bool with_cov = true);

// Marginal-sigma cumulants (privileged non-thermal models).
struct ExactSigmaCumulants {
  double mean_sigma = 0, var_sigma = 0, ift_gap = 0;
};
ExactSigmaCumulants sigma_cumulants_from_mgf(const Protocol& p,
                                             double du = 0.02,
                                             const TiltOptions& o = {});

}  // namespace qjs
