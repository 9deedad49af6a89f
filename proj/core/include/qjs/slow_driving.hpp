// SPDX-License-Identifier: Apache-2.0
// Slow-driving (adiabatic response) route: generalized covariances paired
// through the adjoint Green function of the instantaneous generator, the
// resulting cumulant formulas, the skew (Kubo) correction terms, and the
// closed slow cumulant generating function for detailed-balance families.
#pragma once

#include <optional>

#include "qjs/lindblad.hpp"
#include "qjs/protocol.hpp"

namespace qjs {

// Generalized canonical correlation  C_pi^s(A,B) = tr[pi^s dA pi^(1-s) dB],
// dX = X - tr[pi X]. Static kernel (no Green pairing).
double qcov(const Mat& pi, const Mat& a, const Mat& b, double s);

// Skew information-like correction
//   I_pi(A,B) = (1/2) sum_ij A~_ij B~_ji (p_i + p_j - 2 LM(p_i, p_j)),
// LM the logarithmic mean; equals qcov at s in {0,1} minus its s-average.
double skew_covariance(const Mat& pi, const Mat& a, const Mat& b);

// All slow-driving response objects at one frozen time: the instantaneous
// steady state's spectral data plus the restricted adjoint solver.
class GreenFrame {
 public:
  GreenFrame(const ModelSpec& m, const SteadyState& ss,
             double sector_tol = 1e-9);

  // C^(s)(A,B) = sum_ij Y_ij dB_ji p_j^s p_i^(1-s), with L*(Y) = -dA,
  // tr[Y pi] = 0. Positive-semidefinite in A=B after s-integration.
  double corr(const Mat& a, const Mat& b, double s) const;
  // int_0^1 ds C^(s)(A,B): logarithmic-mean weights, closed form.
  double corr_int(const Mat& a, const Mat& b) const;
  // C-bar^(y)(A,B): the doubly-integrated weight
  //   W_y(p_i,p_j) = p_i [(1+r) - (r^y + r^(1-y))] / ln(r)^2,  r = p_j/p_i,
  // with the r -> 1 limit p_i y(1-y). Symmetric under y <-> 1-y; W_1 = 0.
  double corr_bar(const Mat& a, const Mat& b, double y) const;
  // (C^(1) + C^(0))/2 - int_0^1 ds C^(s): Green-paired skew term.
  double skew_green(const Mat& a, const Mat& b) const;

  const SteadyState& steady() const { return ss_; }
  const RestrictedSolver& solver() const { return solver_; }

 private:
  // Pairing table for one solved observable.
  struct Paired;
  Paired pair(const Mat& a, const Mat& b) const;

  SteadyState ss_;
  RestrictedSolver solver_;
};

struct SlowOptions {
  int panels = 3;               // composite Gauss-Legendre panels over [0,tau]
  int points_per_panel = 64;
  double sector_tol = 1e-9;
  bool check_doubling = false;  // re-integrate at 2x panels, record delta
  bool require_detailed_balance = true;  // gate for the closed CGF
};

struct CumulantReport {
  double adiabatic_work = 0, dF = 0;
  double mean_sigma = 0, var_sigma = 0;
  double mean_w = 0, var_w = 0;      // mean_w includes the adiabatic part
  double dI_sigma = 0, dI_w = 0;     // skew corrections
  double tur_ratio = 0;              // var_w * mean_sigma / (mean_w - W)^2
  double fdr_residual = 0;           // var_sigma - 2 (mean_sigma + dI_sigma)
  double fdr_gap = 0;                // var_sigma - 2 mean_sigma  (= 2 dI_sigma)
  double quad_delta = 0;             // doubling check, if requested
};

// Order-(1/tau) cumulants of (sigma, w) via Green-paired kernels. Thermal
// protocols fill the work entries; non-thermal privileged ones fill the
// sigma entries only.
CumulantReport cumulants_slow(const Protocol& p, const SlowOptions& o = {});

// Closed slow CGF for thermal detailed-balance families:
//   K(u,v) = -int dt [ beta^2 Cbar^(u+Tv)(dH,dH)
//                      + (u - u^2) dbeta^2 C^(0)(H,H)
//                      + (Tv - 2u(u + Tv - 1)) dbeta beta C^(0)(dH,H) ].
// Throws NoDetailedBalanceError unless the family has detailed balance or
// require_detailed_balance is false. Symmetric under (u,v) -> (1-u,-v) by
// construction.
double cgf_joint_slow(const Protocol& p, double u, double v,
                      const SlowOptions& o = {});

// Marginal-sigma slow CGF for privileged families:
//   K_sigma(u) = -int dt Cbar^(u)(dPhi, dPhi).
double cgf_entropy_slow(const Protocol& p, double u, const SlowOptions& o = {});

}  // namespace qjs
