// SPDX-License-Identifier: Apache-2.0
// Independent numerical oracles used only by the test suite. They
// deliberately avoid the production code paths they are meant to check:
// Green functions via explicit semigroup quadrature, trajectory statistics
// via exhaustive path enumeration, and random detailed-balance model
// families for property tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qjs/lindblad.hpp"
#include "qjs/protocol.hpp"
#include "qjs/rng.hpp"

namespace qjs::testing {

// Integral of the adjoint semigroup, Y = int_0^theta_max e^{theta L*}(dA),
// by composite-Simpson time stepping of the dense superoperator (the
// production solver uses a restricted linear solve instead). theta_max
// should be >> 1/gap so the tail is negligible.
inline Mat green_quadrature(const ModelSpec& m, const SteadyState& ss, const Mat& a,
                            double theta_max, int n_sub = 4000) {
  const int d = m.dim();
  const Mat da = a - (ss.pi * a).trace() * Mat::Identity(d, d);
  const Mat gs = build_adjoint_generator(m);
  const double h = theta_max / n_sub;
  const Mat step = expm(Mat(h * gs));
  Vec y = vectorize(da);
  Vec acc = Vec::Zero(d * d);
  for (int k = 0; k <= n_sub; ++k) {
    double w = (k == 0 || k == n_sub) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += (w * h / 3.0) * y;
    if (k < n_sub) y = step * y;
  }
  return unvectorize(acc, d);
}

// Exhaustive small-instance trajectory enumeration: every boundary outcome
// and every jump record over n_steps piecewise-frozen Kraus steps, for both
// the forward process and the independently constructed dual-reverse
// process (Kraus operators pi^(1/2) M^dag pi^(-1/2) in reversed time
// order). Returns total path probabilities and the enumerated IFT average.
struct EnumReport {
  double sum_p = 0.0;      // forward normalization
  double sum_p_rev = 0.0;  // dual-reverse normalization
  double ift = 0.0;        // sum_gamma p(gamma) e^{-sigma(gamma)}
  long n_paths = 0;
};

namespace detail {

struct StepKraus {
  std::vector<Mat> ops;        // ops[0] = no-jump
  std::vector<double> dphi;    // potential shift per outcome (0 for no-jump)
};

inline StepKraus forward_step(const Protocol& p, double t, double dt) {
  const ModelSpec m = p.model(t);
  const SteadyState ss = p.steady(t);
  const int d = m.dim();
  Mat msum = Mat::Zero(d, d);
  for (const auto& j : m.jumps) msum += j.L.adjoint() * j.L;
  StepKraus k;
  k.ops.push_back(Mat::Identity(d, d) -
                  (kI * p.propagation_hamiltonian(t, m) + 0.5 * msum) * dt);
  k.dphi.push_back(0.0);
  for (const auto& j : m.jumps) {
    k.ops.push_back(std::sqrt(dt) * j.L);
    const Mat conj = ss.spec.power(1.0) * j.L * ss.spec.power(-1.0);
    const cplx c = (j.L.adjoint() * conj).trace() / j.L.squaredNorm();
    k.dphi.push_back(-std::log(c.real()));
  }
  return k;
}

inline StepKraus dual_step(const Protocol& p, double t, double dt) {
  const SteadyState ss = p.steady(t);
  const Mat ph = ss.spec.power(0.5), pmh = ss.spec.power(-0.5);
  StepKraus f = forward_step(p, t, dt);
  StepKraus k;
  for (size_t i = 0; i < f.ops.size(); ++i) {
    k.ops.push_back(ph * f.ops[i].adjoint() * pmh);
    k.dphi.push_back(-f.dphi[i]);
  }
  return k;
}

inline void walk(const std::vector<StepKraus>& steps, size_t n, const Vec& psi,
                 double log_p0, double acc_dphi, const SpectralDecomp& final_basis,
                 EnumReport& out, bool forward) {
  if (n == steps.size()) {
    const int d = static_cast<int>(psi.size());
    for (int nu = 0; nu < d; ++nu) {
      const cplx amp = final_basis.evec.col(nu).dot(psi);
      const double pr = std::exp(log_p0) * std::norm(amp);
      out.n_paths++;
      if (forward) {
        out.sum_p += pr;
        const double sigma = -std::log(final_basis.eval[nu]) + log_p0 - acc_dphi;
        out.ift += pr * std::exp(-sigma);
      } else {
        out.sum_p_rev += pr;
      }
    }
    return;
  }
  const StepKraus& sk = steps[n];
  for (size_t x = 0; x < sk.ops.size(); ++x)
    walk(steps, n + 1, Vec(sk.ops[x] * psi), log_p0, acc_dphi + sk.dphi[x],
         final_basis, out, forward);
}

}  // namespace detail

inline EnumReport enumerate_paths(const Protocol& p, int n_steps) {
  const double dt = p.tau / n_steps;
  const SteadyState ss0 = p.steady(0.0), ssT = p.steady(p.tau);
  std::vector<detail::StepKraus> fwd, rev;
  for (int n = 0; n < n_steps; ++n) {
    const double t = (n + 0.5) * dt;
    fwd.push_back(detail::forward_step(p, t, dt));
    rev.push_back(detail::dual_step(p, p.tau - t, dt));
  }
  EnumReport out;
  const int d = static_cast<int>(ss0.spec.evec.rows());
  for (int mu = 0; mu < d; ++mu)
    detail::walk(fwd, 0, Vec(ss0.spec.evec.col(mu)), std::log(ss0.spec.eval[mu]),
                 0.0, ssT.spec, out, true);
  for (int nu = 0; nu < d; ++nu)
    detail::walk(rev, 0, Vec(ssT.spec.evec.col(nu)), std::log(ssT.spec.eval[nu]),
                 0.0, ss0.spec, out, false);
  return out;
}

// Random model obeying quantum detailed balance: random spectrum, Gibbs-type
// stationary state, and two-way jump ladder between every level pair at
// KMS-ratio rates, conjugated by a Haar-ish random unitary.
inline ModelSpec random_db_model(int d, Xoshiro256pp& rng, RVec* p_out = nullptr) {
  const auto gauss = [&rng]() {
    const double u1 = std::max(rng.uniform(), 1e-16), u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  };
  RVec e(d);
  for (int i = 0; i < d; ++i) e[i] = 2.0 * rng.uniform();
  std::sort(e.begin(), e.end());
  for (int i = 1; i < d; ++i)
    if (e[i] - e[i - 1] < 0.05) e[i] = e[i - 1] + 0.05 + 0.2 * rng.uniform();

  RVec p(d);
  for (int i = 0; i < d; ++i) p[i] = std::exp(-e[i]);
  p /= p.sum();

  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cplx(gauss(), gauss());
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();

  ModelSpec m;
  m.H = q * e.asDiagonal() * q.adjoint();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double c = 0.3 + 0.9 * rng.uniform();
      Mat down = Mat::Zero(d, d), up = Mat::Zero(d, d);
      down(i, j) = 1.0;
      up(j, i) = 1.0;
      const double r = std::sqrt(p[i] / p[j]);  // KMS ratio
      m.jumps.push_back({"d", std::sqrt(c * r) * (q * down * q.adjoint())});
      m.jumps.push_back({"u", std::sqrt(c / r) * (q * up * q.adjoint())});
    }
  if (p_out) *p_out = p;
  return m;
}

}  // namespace qjs::testing
