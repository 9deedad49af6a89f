// SPDX-License-Identifier: Apache-2.0
// Parametrically driven, thermally damped harmonic oscillator (trapped-ion
// engine model): closed-form slow-driving results for arbitrary frequency /
// temperature ramps, the smooth built-in ramp family, and a truncated-ladder
// numeric twin expressed in the co-moving oscillator frame.
#pragma once

#include <vector>

#include "qjs/protocol.hpp"

namespace qjs {

struct IonParams {
  double omega0 = 1.0;
  double Gamma = 1.0;
  double Tc = 1.0;    // bath temperature at the protocol endpoints
  double Th = 2.0;    // mid-protocol temperature
  double tau = 100.0;
  int n_max = 40;     // ladder truncation of the numeric twin
  double tail_tol = 1e-8;  // max allowed thermal weight at level n_max
};

// Smooth ramps with stationary endpoints:
//   omega(t) = omega0 (1 + 1/2 sin(2 pi t/tau) + 1/4 sin(4 pi t/tau + pi)),
//   beta(t)  = beta_c + (beta_h - beta_c) sin^2(pi t/tau).
struct IonCurves {
  std::function<double(double)> omega, domega, beta, dbeta;
};
IonCurves ion_curves(const IonParams& p);

// Largest instantaneous thermal weight on the top ladder level along the
// protocol (used to validate n_max against tail_tol).
double ion_truncation_tail(const IonParams& p);

// Numeric twin: fixed (n_max+1)-level ladder, H = omega(t)(n + 1/2) diagonal,
// jumps sqrt(Gamma(N+1)) a and sqrt(Gamma N) a^dag, physical
// dH = (domega/2)(a^2 + a^dag^2 + 2n + 1), and the co-moving-frame gauge
// term (i domega / 4 omega)(a^dag^2 - a^2) applied during propagation only.
// Throws TruncationInadequateError if the thermal tail exceeds tail_tol.
Protocol ion_protocol(const IonParams& p);

// Closed-form slow-driving cumulants (exact oscillator algebra, adaptive
// quadrature over t; no truncation).
struct IonClosedForm {
  double adiabatic_work = 0;
  double mean_w_excess = 0;  // <w> - adiabatic_work
  double var_w = 0;
  double mean_sigma = 0, var_sigma = 0;
  double two_dI_sigma = 0;   // 2 * skew correction of sigma = fdr gap
  double dI_w = 0;           // skew correction of w (per unit protocol time)
  double tur_ratio = 0;      // var_w * mean_sigma / mean_w_excess^2
  double fdr_gap = 0;        // var_sigma - 2 mean_sigma
};
IonClosedForm ion_closed_form(const IonParams& p, double quad_tol = 1e-12);

// Closed-form slow CGF K(u, v) of the same family.
double ion_cgf_slow(const IonParams& p, double u, double v,
                    double quad_tol = 1e-12);

// Trade-off sweep over equilibration time t_eq = 1/Gamma and cold
// temperature Tc (Th = 2 Tc), closed forms only.
struct Fig1Row {
  double t_eq = 0, Tc = 0;
  double tur_ratio = 0, fdr_gap = 0;
  double mean_w = 0, var_w = 0, mean_sigma = 0, var_sigma = 0;
  double adiabatic_work = 0;
};
std::vector<Fig1Row> fig1_sweep(const IonParams& base, int n_teq = 25,
                                int n_tc = 25, double teq_min = 0.05,
                                double teq_max = 5.0, double tc_min = 0.5,
                                double tc_max = 4.0);

}  // namespace qjs
