// SPDX-License-Identifier: Apache-2.0
// GKSL generators, stationary states, restricted inverses (Drazin / Green),
// and structure checks (privileged representation, covariance, detailed
// balance).
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qjs/operator_core.hpp"
#include "qjs/types.hpp"

namespace qjs {

struct JumpOp {
  std::string label;
  Mat L;
};

// A frozen-parameter open-system model: Hamiltonian plus jump operators.
struct ModelSpec {
  Mat H;
  std::vector<JumpOp> jumps;

  int dim() const { return static_cast<int>(H.rows()); }
  // Throws ConfigError on non-Hermitian H or shape mismatches.
  void validate(double herm_tol = 1e-10) const;
};

// L(X)  = -i[H, X] + sum_x ( L_x X L_x^+ - 1/2 {L_x^+ L_x, X} )
// L*(A) = +i[H, A] + sum_x ( L_x^+ A L_x - 1/2 {L_x^+ L_x, A} )
Mat apply_generator(const ModelSpec& m, const Mat& x);
Mat apply_adjoint_generator(const ModelSpec& m, const Mat& a);

// Dense d^2 x d^2 matrices of the two generators (column-stacking).
Mat build_generator(const ModelSpec& m);
Mat build_adjoint_generator(const ModelSpec& m);

struct SteadyState {
  Mat pi;                      // unit-trace faithful stationary state
  SpectralDecomp spec;         // eigensystem of pi
  double residual = 0.0;       // ||L(pi)||_F
  std::optional<double> gap;   // -Re(lambda_2), when computed
};

struct SteadyStateOptions {
  double degeneracy_tol = 1e-10;  // second zero mode within this -> error
  double faithful_tol = 1e-12;    // eigenvalue floor for faithfulness
  bool want_gap = true;
};

// Stationary state from the dense spectral decomposition of L. Throws
// DegenerateSteadyStateError / NonFaithfulError.
SteadyState steady_state(const ModelSpec& m, const SteadyStateOptions& opt = {});

// Gibbs state exp(-beta H)/Z as a SteadyState, verified stationary for m
// within `residual_tol` (throws NumericError otherwise). Does not compute
// the gap (pass through steady_state for that).
SteadyState thermal_state(const ModelSpec& m, double beta,
                          double residual_tol = 1e-8);

// ln tr exp(-beta H)
double log_partition(const Mat& H, double beta);

// Restricted solver for the (adjoint) generator on its regular subspace.
// Uses the modular/Bohr sector block structure in the joint (pi, H)
// eigenframe when the generator respects it (exactly the privileged case),
// otherwise falls back to one dense bordered solve. Both paths reject
// ill-conditioned restrictions with SingularRestrictionError.
class RestrictedSolver {
 public:
  enum class Side { Schrodinger, Adjoint };

  RestrictedSolver(const ModelSpec& m, const SteadyState& ss, Side side,
                   double sector_tol = 1e-9);

  // Schrodinger side: solves L(Y) = R with tr Y = 0   (R must be traceless)
  // Adjoint side:     solves L*(Y) = R with tr[Y pi] = 0 (tr[R pi] = 0)
  Mat solve(const Mat& r) const;

  bool sectored() const { return sectored_; }
  double off_sector_mass() const { return off_sector_mass_; }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  bool sectored_ = false;
  double off_sector_mass_ = 0.0;
};

// Drazin inverse action L^+(X): solves L(Y) = X - tr[X] pi with tr Y = 0.
Mat drazin_apply(const ModelSpec& m, const SteadyState& ss, const Mat& x);

// Green-function pairing of the adjoint semigroup:
// Y = int_0^inf dtheta e^{theta L*}(dA), i.e. L*(Y) = -dA, tr[Y pi] = 0,
// where dA = A - tr[A pi] * 1.
Mat adjoint_green(const ModelSpec& m, const SteadyState& ss, const Mat& a);

// Structure report for a frozen model against a stationary state.
struct PrivilegedStructure {
  bool privileged = false;        // every jump is a modular eigenoperator
  bool covariant = false;         // [L*, i[H,.]] = 0
  bool detailed_balance = false;  // Ltilde = L* - 2i[H,.]
  std::vector<double> dphi;       // per-jump potential change
  std::vector<double> jump_residual;  // relative fit residual per jump
  double h_commute_residual = 0.0;    // ||[H, pi]|| / (||H|| ||pi||)
  double covariance_residual = 0.0;
  double db_residual = 0.0;
  double tol = 0.0;
};

// Weighted log-domain fit of pi L pi^{-1} = e^{-dphi} L. `lnp` holds ln p_i
// for the stationary populations and `lb` is L expressed in the same
// eigenbasis. The condition is elementwise -- lb_ij != 0 forces
// ln p_j - ln p_i = dphi -- so the fit averages that difference with weights
// |lb_ij|^2 and reports the rms spread as the residual. Working with log
// ratios keeps steep spectra (populations spanning hundreds of orders of
// magnitude) exactly representable.
struct ModularFit {
  double dphi = 0.0;
  double residual = 0.0;  // rms log-ratio spread over the support of L
};
ModularFit modular_fit(const RVec& lnp, const Mat& lb);

// Fits pi L_x pi^{-1} = e^{-dphi_x} L_x per jump via modular_fit, and
// reports covariance and detailed-balance residuals. Detailed balance is
// checked as invariance of the jump ensemble under the modular conjugation
// L_x -> e^{dphi_x/2} L_x^dagger (equality of the two completely positive
// maps, evaluated on Gram matrices).
PrivilegedStructure check_structure(const ModelSpec& m, const SteadyState& ss,
                                    double tol = 1e-8);

}  // namespace qjs
