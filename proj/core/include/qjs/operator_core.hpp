// SPDX-License-Identifier: Apache-2.0
// Dense operator algebra: vectorization, superoperator builders, spectral
// calculus of positive matrices, and matrix exponentials (dense Pade and
// Krylov action).
#pragma once

#include <functional>

#include "qjs/types.hpp"

namespace qjs {

inline Mat dag(const Mat& a) { return a.adjoint(); }
inline Mat comm(const Mat& a, const Mat& b) { return a * b - b * a; }
inline Mat acomm(const Mat& a, const Mat& b) { return a * b + b * a; }

// Column-stacking vectorization: vec(X)(i + d*j) = X(i, j).
Vec vectorize(const Mat& x);
Mat unvectorize(const Vec& v, int dim);

// Superoperator builders in the column-stacking convention,
// vec(A X B) = (B^T kron A) vec(X).
Mat spre(const Mat& a);            // X -> A X
Mat spost(const Mat& b);           // X -> X B
Mat sandwich(const Mat& a, const Mat& b);  // X -> A X B

// Hermitian eigendecomposition with helpers for fractional powers and logs.
// Powers/logs of states floor eigenvalues at `floor_at` and report whether
// flooring occurred (non-faithful states).
struct SpectralDecomp {
  RVec eval;  // ascending
  Mat evec;   // columns are eigenvectors

  static SpectralDecomp hermitian(const Mat& a);

  Mat apply(const std::function<double(double)>& f) const;
  // a^s with eigenvalue floor (throws NonFaithfulError if requested)
  Mat power(double s, double floor_at = kPositivityFloor) const;
  Mat log(double floor_at = kPositivityFloor) const;
  double min_eval() const { return eval.minCoeff(); }
};

// Fixed-order (13/13) scaling-and-squaring Pade matrix exponential.
Mat expm(const Mat& a);

// y = exp(t*A) v where A is given by its action; Arnoldi (Krylov) with
// internal substepping. `tol` is a relative accuracy target per call.
Vec expmv(const std::function<void(const Vec&, Vec&)>& apply_a, double t,
          const Vec& v, double tol = 1e-12, int krylov_dim = 36);

// exp(h*G) v for a dense superoperator G: dense path for small dimensions,
// Krylov action otherwise. The split point keeps dense exponentials cheap.
Vec propagate_step(const Mat& g, double h, const Vec& v, double tol = 1e-12);

}  // namespace qjs
