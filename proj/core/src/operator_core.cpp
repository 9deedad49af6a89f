// SPDX-License-Identifier: Apache-2.0
#include "qjs/operator_core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace qjs {

Vec vectorize(const Mat& x) {
  const int d = static_cast<int>(x.rows());
  Vec v(static_cast<Eigen::Index>(d) * x.cols());
  for (int j = 0; j < x.cols(); ++j) v.segment(static_cast<Eigen::Index>(j) * d, d) = x.col(j);
  return v;
}

Mat unvectorize(const Vec& v, int dim) {
  Mat x(dim, v.size() / dim);
  for (int j = 0; j < x.cols(); ++j) x.col(j) = v.segment(static_cast<Eigen::Index>(j) * dim, dim);
  return x;
}

Mat spre(const Mat& a) {
  const int d = static_cast<int>(a.rows());
  Mat s = Mat::Zero(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (int j = 0; j < d; ++j) s.block(static_cast<Eigen::Index>(j) * d, static_cast<Eigen::Index>(j) * d, d, d) = a;
  return s;
}

Mat spost(const Mat& b) {
  const int d = static_cast<int>(b.rows());
  Mat s = Mat::Zero(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      s.block(static_cast<Eigen::Index>(j) * d, static_cast<Eigen::Index>(i) * d, d, d) +=
          b(i, j) * Mat::Identity(d, d);
  return s;
}

Mat sandwich(const Mat& a, const Mat& b) {
  // vec(A X B) = (B^T kron A) vec(X)
  const int d = static_cast<int>(a.rows());
  Mat s(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      s.block(static_cast<Eigen::Index>(j) * d, static_cast<Eigen::Index>(i) * d, d, d) = b(i, j) * a;
  return s;
}

SpectralDecomp SpectralDecomp::hermitian(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success) throw NumericError("hermitian eigensolver failed");
  SpectralDecomp sd;
  sd.eval = es.eigenvalues();
  sd.evec = es.eigenvectors();
  return sd;
}

Mat SpectralDecomp::apply(const std::function<double(double)>& f) const {
  RVec fe(eval.size());
  for (Eigen::Index i = 0; i < eval.size(); ++i) fe[i] = f(eval[i]);
  return evec * fe.asDiagonal() * evec.adjoint();
}

Mat SpectralDecomp::power(double s, double floor_at) const {
  return apply([s, floor_at](double x) { return std::pow(std::max(x, floor_at), s); });
}

Mat SpectralDecomp::log(double floor_at) const {
  return apply([floor_at](double x) { return std::log(std::max(x, floor_at)); });
}

// ---- dense exponential ------------------------------------------------------

namespace {

// [13/13] Pade coefficients (Higham 2005).
constexpr double kPade13[] = {
    6.4764752532480000e16, 3.2382376266240000e16, 7.7717703038976000e15,
    1.1873537964288000e15, 1.2906019526400000e14, 1.0559470521600000e13,
    6.7044257280000000e11, 3.3522128640000000e10, 1.3232419200000000e9,
    4.0840800000000000e7,  9.6096000000000000e5,  1.6380000000000000e4,
    1.8200000000000000e2,  1.0};

}  // namespace

Mat expm(const Mat& a) {
  const int d = static_cast<int>(a.rows());
  const Mat id = Mat::Identity(d, d);
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  // theta_13 for double precision
  constexpr double kTheta13 = 5.371920351148152;
  int squarings = 0;
  if (norm1 > kTheta13) squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
  const Mat as = a / std::pow(2.0, squarings);

  const Mat a2 = as * as;
  const Mat a4 = a2 * a2;
  const Mat a6 = a2 * a4;
  const double* b = kPade13;
  const Mat u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                      b[3] * a2 + b[1] * id);
  const Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
                b[0] * id;
  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

// ---- Krylov action ----------------------------------------------------------

namespace {

// One Arnoldi sweep (Saad): approximates exp(h*A) v on a growing Krylov
// space, returning as soon as the a-posteriori estimate
// err = beta * h_{k+1,k} * |[exp(h H_k)]_{k,1}| meets tol; if the basis is
// exhausted, the substep h is halved. Writes the accepted substep to h_done.
Vec arnoldi_step(const std::function<void(const Vec&, Vec&)>& apply_a, double h_req,
                 const Vec& v, double tol, int m, double& h_done) {
  const double beta = v.norm();
  if (beta == 0.0) {
    h_done = h_req;
    return v;
  }
  const Eigen::Index n = v.size();
  m = static_cast<int>(std::min<Eigen::Index>(m, n));
  Mat V(n, m);
  Mat H = Mat::Zero(m, m);
  V.col(0) = v / beta;
  Vec w(n);
  int k = 0;
  double h_next = 0.0;  // |h_{k+1,k}|; 0 marks an invariant subspace

  auto attempt = [&](double h) -> std::pair<double, Vec> {
    const Mat E = expm(Mat(h * H.topLeftCorner(k, k)));
    Vec y = E.col(0);
    const double err = beta * h_next * std::abs(y[k - 1]);
    return {err / std::max(beta * y.norm(), 1e-300), std::move(y)};
  };

  for (int j = 0; j < m; ++j) {
    apply_a(V.col(j), w);
    for (int pass = 0; pass < 2; ++pass)  // MGS with re-orthogonalization
      for (int i = 0; i <= j; ++i) {
        const cplx c = V.col(i).dot(w);
        H(i, j) += c;
        w -= c * V.col(i);
      }
    const double hn = w.norm();
    k = j + 1;
    h_next = hn;
    const bool happy = hn < 1e-14 * beta;
    if (!happy && j + 1 < m) {
      H(j + 1, j) = hn;
      V.col(j + 1) = w / hn;
    }
    // The error check costs an expm of the k x k Hessenberg block, so probe
    // on a sparse cadence rather than at every iteration.
    if (happy || k == m || (k >= 4 && k % 4 == 0)) {
      auto [rel, y] = attempt(h_req);
      if (happy || rel <= tol) {
        h_done = h_req;
        return beta * (V.leftCols(k) * y);
      }
    }
  }

  // basis exhausted at k = m: shrink the substep until accurate
  double h = h_req;
  for (int tries = 0; tries < 60; ++tries) {
    h *= 0.5;
    if (h < 1e-14 * std::abs(h_req))
      throw NumericError("expmv: substep underflow before reaching tolerance");
    auto [rel, y] = attempt(h);
    if (h_next == 0.0 || rel <= tol) {
      h_done = h;
      return beta * (V.leftCols(k) * y);
    }
  }
  throw NumericError("expmv: Krylov step failed to converge");
}

}  // namespace

Vec expmv(const std::function<void(const Vec&, Vec&)>& apply_a, double t, const Vec& v,
          double tol, int krylov_dim) {
  if (t == 0.0) return v;
  Vec y = v;
  double done = 0.0;
  int guard = 0;
  while (done < t - 1e-15 * t) {
    double h_done = 0.0;
    y = arnoldi_step(apply_a, t - done, y, tol, krylov_dim, h_done);
    done += h_done;
    if (++guard > 10000) throw NumericError("expmv: too many substeps");
  }
  return y;
}

Vec propagate_step(const Mat& g, double h, const Vec& v, double tol) {
  if (g.rows() <= 64) return expm(Mat(h * g)) * v;
  return expmv([&g](const Vec& x, Vec& y) { y.noalias() = g * x; }, h, v, tol);
}

}  // namespace qjs
