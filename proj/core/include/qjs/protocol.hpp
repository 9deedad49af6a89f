// SPDX-License-Identifier: Apache-2.0
// Driving protocols: a time-dependent model family with analytic
// derivatives, plus built-in qubit and qutrit families used by the tests
// and the CLI.
#pragma once

#include <functional>
#include <string>

#include "qjs/lindblad.hpp"

namespace qjs {

// A smooth family lambda(t) on [0, tau]. `model` and `dH` describe the
// physical Hamiltonian path (dH is the physical time derivative of H in the
// representation basis); `gauge` is an optional extra Hermitian term added
// to H only while *propagating* states (it represents the frame motion of a
// co-moving representation and has no thermodynamic bookkeeping of its own).
struct Protocol {
  double tau = 1.0;
  bool thermal = true;
  std::string name;

  std::function<ModelSpec(double)> model;
  std::function<Mat(double)> dH;
  std::function<Mat(double)> gauge;  // may be empty (= zero)

  std::function<double(double)> beta, dbeta;  // thermal paths only

  // Non-thermal paths: analytic stationary state and (optionally) its
  // centred potential current dPhi = d(-ln pi)/dt - tr[pi * d(-ln pi)/dt].
  std::function<Mat(double)> pi_fn;
  std::function<Mat(double)> phidot_fn;

  double steady_residual_tol = 1e-8;

  SteadyState steady(double t) const;
  // H(t) plus the gauge term; what trajectory and tilted propagation use.
  Mat propagation_hamiltonian(double t, const ModelSpec& m) const;
  double ln_Z(double t) const;  // thermal only (ConfigError otherwise)
};

// Work performed on the instantaneous steady manifold,
// W = int_0^tau dt tr[dH(t) pi(t)], by panel-doubling quadrature.
double adiabatic_work(const Protocol& p, double tol = 1e-10,
                      double* err_out = nullptr);

// Equilibrium free-energy difference T(0) ln Z(0) - T(tau) ln Z(tau).
double delta_F(const Protocol& p);

// Time-reversed driving: lambda~(t) = lambda(tau - t). Derivative-like
// members (dH, gauge, dbeta, phidot) flip sign.
Protocol reversed(const Protocol& p);

// ---- built-in families ----------------------------------------------------

// Thermally damped qubit, H(t) = (omega(t)/2) (cos(theta) sz + sin(theta) sx)
// with jumps sigma_-/sigma_+ in the instantaneous eigenbasis at KMS rates
// Gamma(N+1), Gamma N. theta_max = 0 gives the commuting family; > 0 makes
// [dH, H] != 0 (coherent drive). Endpoints of omega, beta, theta are
// stationary.
struct QubitDriveParams {
  double omega0 = 1.5;
  double Gamma = 1.0;
  double beta_c = 1.0;   // endpoints
  double beta_h = 0.6;   // mid-protocol
  double tau = 50.0;
  double theta_max = 0.0;
  double amp1 = 0.5, amp2 = 0.25;  // omega modulation amplitudes
};
Protocol qubit_protocol(const QubitDriveParams& q);

// Synthetic non-thermal qutrit: pi(t) is a prescribed rotating spectral
// family (closed form), the generator is built from pairwise-balanced jumps
// plus an optional uniform cycle current that breaks detailed balance while
// keeping pi stationary and the representation privileged.
struct SyntheticQutritParams {
  double tau = 20.0;
  double cycle_current = 0.0;  // > 0 breaks detailed balance
  double theta_max = 0.6;      // eigenframe rotation amplitude
  double base_rate = 1.0;
};
Protocol synthetic_qutrit_protocol(const SyntheticQutritParams& q);

}  // namespace qjs
