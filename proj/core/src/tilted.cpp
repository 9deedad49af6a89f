// SPDX-License-Identifier: Apache-2.0
#include "qjs/tilted.hpp"

#include <cmath>
#include <set>

#include "qjs/quadrature.hpp"
#include "qjs/trajectory.hpp"  // DiagOp for banded superoperator action

namespace qjs {

namespace {

// (1 - e^{-y*delta}) / delta, with the delta -> 0 limit y
double ramp_weight(double y, double delta) {
  const double z = y * delta;
  if (std::abs(z) < 1e-8) return y * (1.0 - 0.5 * z + z * z / 6.0);
  return -std::expm1(-z) / delta;
}

Mat centered(const Mat& a, const Mat& pi) {
  return a - (pi * a).trace() * Mat::Identity(a.rows(), a.cols());
}

}  // namespace

Mat joint_tilt(const Mat& h, const Mat& dh, const Mat& pi, double beta, double dbeta,
               double u, double v) {
  const SpectralDecomp hd = SpectralDecomp::hermitian(h);
  const Mat dhc = centered(dh, pi);
  const Mat hc = centered(h, pi);
  const double y = 0.5 * (u * beta + v);
  const Mat dhb = hd.evec.adjoint() * dhc * hd.evec;
  const int d = static_cast<int>(h.rows());
  Mat ups(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      ups(i, j) = -dhb(i, j) * ramp_weight(y, hd.eval[i] - hd.eval[j]);
  Mat out = hd.evec * ups * hd.evec.adjoint();
  out -= 0.5 * u * dbeta * hc;
  return out;
}

Mat entropy_tilt(const Mat& pi, const Mat& phidot, double u) {
  const SpectralDecomp pd = SpectralDecomp::hermitian(pi);
  const Mat pc = centered(phidot, pi);
  const Mat pb = pd.evec.adjoint() * pc * pd.evec;
  const int d = static_cast<int>(pi.rows());
  Mat ups(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      // modular exponent phi_i - phi_j = ln p_j - ln p_i
      const double delta = std::log(std::max(pd.eval[j], kPositivityFloor)) -
                           std::log(std::max(pd.eval[i], kPositivityFloor));
      ups(i, j) = -pb(i, j) * ramp_weight(0.5 * u, delta);
    }
  return pd.evec * ups * pd.evec.adjoint();
}

// ---- product integral ---------------------------------------------------------

namespace {

// banded action of X -> -i[Hp, X] + sum(L X L^+ - 1/2 {M, X}) + Ups X + X Ups^+
struct BandedStep {
  int d = 0;
  DiagOp hp, m;  // Hermitian
  std::vector<DiagOp> l, ldag;
  DiagOp ups, upsdag;

  // out += scale * (A X) with A banded
  static void lmul(const DiagOp& a, const Eigen::Map<const Mat>& x, Mat& out, cplx scale) {
    const int d = a.dim;
    for (size_t b = 0; b < a.offsets.size(); ++b) {
      const int k = a.offsets[b];
      const int j0 = std::max(0, -k);
      const Vec& band = a.bands[b];
      const int len = static_cast<int>(band.size());
      for (int c = 0; c < d; ++c)
        for (int j = 0; j < len; ++j) out(j0 + j + k, c) += scale * band[j] * x(j0 + j, c);
    }
  }
  // out += scale * (X B) with B banded: (X B).col(j) += B(j+k, j) X.col(j+k)
  static void rmul(const DiagOp& bop, const Eigen::Map<const Mat>& x, Mat& out, cplx scale) {
    for (size_t b = 0; b < bop.offsets.size(); ++b) {
      const int k = bop.offsets[b];
      const int j0 = std::max(0, -k);
      const Vec& band = bop.bands[b];
      const int len = static_cast<int>(band.size());
      for (int j = 0; j < len; ++j) out.col(j0 + j) += (scale * band[j]) * x.col(j0 + j + k);
    }
  }

  void apply(const Vec& xv, Vec& yv) const {
    Eigen::Map<const Mat> x(xv.data(), d, d);
    thread_local Mat out;
    out.setZero(d, d);
    lmul(hp, x, out, -kI);
    rmul(hp, x, out, kI);
    lmul(m, x, out, -0.5);
    rmul(m, x, out, -0.5);
    lmul(ups, x, out, 1.0);
    rmul(upsdag, x, out, 1.0);
    thread_local Mat tmp;
    for (size_t jx = 0; jx < l.size(); ++jx) {
      tmp.setZero(d, d);
      rmul(ldag[jx], x, tmp, 1.0);
      Eigen::Map<const Mat> tview(tmp.data(), d, d);
      lmul(l[jx], tview, out, 1.0);
    }
    yv = Eigen::Map<const Vec>(out.data(), static_cast<Eigen::Index>(d) * d);
  }
};

// Matrix diagonals k = row - col that one application of the step generator
// can populate, read off the compiled band structure.  lmul/rmul by a band at
// offset p shifts a matrix diagonal by p; the sandwich L X L^+ shifts by the
// sum of the two factors' offsets.
std::vector<int> step_offsets(const BandedStep& bs) {
  std::set<int> o;
  auto add_all = [&o](const DiagOp& op) { o.insert(op.offsets.begin(), op.offsets.end()); };
  add_all(bs.hp);
  add_all(bs.m);
  add_all(bs.ups);
  add_all(bs.upsdag);
  for (size_t j = 0; j < bs.l.size(); ++j)
    for (int p : bs.l[j].offsets)
      for (int q : bs.ldag[j].offsets) o.insert(p + q);
  return {o.begin(), o.end()};
}

std::vector<int> diag_support(const Mat& x) {
  const int d = static_cast<int>(x.rows());
  const double mx = x.cwiseAbs().maxCoeff();
  std::vector<int> ks;
  for (int k = -(d - 1); k <= d - 1; ++k) {
    const int j0 = std::max(0, -k);
    double bm = 0.0;
    for (int j = j0; j < j0 + d - std::abs(k); ++j) bm = std::max(bm, std::abs(x(j + k, j)));
    if (bm > 1e-14 * mx) ks.push_back(k);
  }
  return ks;
}

std::vector<int> close_diagonals(int d, const std::vector<int>& start,
                                 const std::vector<int>& offsets) {
  std::vector<char> in(2 * d - 1, 0);
  std::vector<int> work(start);
  for (int k : start) in[k + d - 1] = 1;
  while (!work.empty()) {
    const int k = work.back();
    work.pop_back();
    for (int o : offsets) {
      const int k2 = k + o;
      if (std::abs(k2) > d - 1 || in[k2 + d - 1]) continue;
      in[k2 + d - 1] = 1;
      work.push_back(k2);
    }
  }
  std::vector<int> ks;
  for (int k = -(d - 1); k <= d - 1; ++k)
    if (in[k + d - 1]) ks.push_back(k);
  return ks;
}

// Vectorized (column-major) indices of the entries on the given diagonals.
std::vector<Eigen::Index> sector_indices(int d, const std::vector<int>& ks) {
  std::vector<Eigen::Index> idx;
  for (int k : ks) {
    const int j0 = std::max(0, -k);
    for (int j = j0; j < j0 + d - std::abs(k); ++j)
      idx.push_back(static_cast<Eigen::Index>(j) * d + (j + k));
  }
  return idx;
}

// Generator matrix on the invariant sector, materialized column by column.
Mat restricted_generator(const BandedStep& bs, const std::vector<Eigen::Index>& idx) {
  const int r = static_cast<int>(idx.size());
  Mat w(r, r);
  Vec x = Vec::Zero(static_cast<Eigen::Index>(bs.d) * bs.d);
  Vec y;
  for (int c = 0; c < r; ++c) {
    x[idx[c]] = 1.0;
    bs.apply(x, y);
    x[idx[c]] = 0.0;
    for (int rr = 0; rr < r; ++rr) w(rr, c) = y[idx[rr]];
  }
  return w;
}

struct PassContext {
  const Protocol* p = nullptr;
  double u = 0, v = 0;
  bool entropy_mode = false;
};

// Gibbs state without the stationarity re-check (the protocol's own
// steady(0) already validated the family once per pass).
Mat fast_thermal_pi(const Mat& h, double beta) {
  const SpectralDecomp hd = SpectralDecomp::hermitian(h);
  const double e0 = hd.eval.minCoeff();
  RVec w(hd.eval.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = std::exp(-beta * (hd.eval[i] - e0));
  w /= w.sum();
  return hd.evec * w.asDiagonal() * hd.evec.adjoint();
}

Mat tilt_at(const PassContext& c, double t, const ModelSpec& m) {
  const Protocol& p = *c.p;
  if (!c.entropy_mode) {
    if (!p.thermal) throw ConfigError("joint tilt requires a thermal protocol");
    const Mat pi = fast_thermal_pi(m.H, p.beta(t));
    return joint_tilt(m.H, p.dH(t), pi, p.beta(t), p.dbeta(t), c.u, c.v);
  }
  if (p.thermal) {
    const Mat pi = fast_thermal_pi(m.H, p.beta(t));
    const Mat phidot = p.dbeta(t) * centered(m.H, pi) + p.beta(t) * centered(p.dH(t), pi);
    return entropy_tilt(pi, phidot, c.u);
  }
  if (!p.pi_fn || !p.phidot_fn)
    throw ConfigError("entropy tilt on a non-thermal protocol needs pi_fn and phidot_fn");
  return entropy_tilt(p.pi_fn(t), p.phidot_fn(t), c.u);
}

Mat dense_generator(const PassContext& c, double t) {
  const Protocol& p = *c.p;
  const ModelSpec m = p.model(t);
  const Mat hp = p.propagation_hamiltonian(t, m);
  const Mat ups = tilt_at(c, t, m);
  const int d = static_cast<int>(hp.rows());
  Mat gs = -kI * (spre(hp) - spost(hp));
  Mat msum = Mat::Zero(d, d);
  for (const auto& j : m.jumps) {
    msum += j.L.adjoint() * j.L;
    gs += sandwich(j.L, j.L.adjoint());
  }
  gs -= 0.5 * (spre(msum) + spost(msum));
  gs += spre(ups) + spost(Mat(ups.adjoint()));
  return gs;
}

BandedStep banded_step(const PassContext& c, double t) {
  const Protocol& p = *c.p;
  const ModelSpec m = p.model(t);
  const Mat hp = p.propagation_hamiltonian(t, m);
  const Mat ups = tilt_at(c, t, m);
  const int d = static_cast<int>(hp.rows());
  BandedStep bs;
  bs.d = d;
  bs.hp = DiagOp::compile(hp);
  Mat msum = Mat::Zero(d, d);
  for (const auto& j : m.jumps) {
    bs.l.push_back(DiagOp::compile(j.L));
    bs.ldag.push_back(DiagOp::compile(Mat(j.L.adjoint())));
    msum += j.L.adjoint() * j.L;
  }
  bs.m = DiagOp::compile(msum);
  bs.ups = DiagOp::compile(ups);
  bs.upsdag = DiagOp::compile(Mat(ups.adjoint()));
  return bs;
}

// Largest invariant-sector dimension worth materializing: beyond this the
// dense expm of the restricted generator stops beating the Krylov fallback.
constexpr int kSectorDimMax = 64;

// One pass of the product integral at fixed step count, using the 4th-order
// commutator-free Magnus scheme: two Gauss-node generators per step combined
// into two exponentials.  Models whose generator closes on a small set of
// matrix diagonals (detected from the compiled band offsets) are propagated
// on that sector with a dense exponential; everything else falls back to a
// matrix-free Krylov exponential on the full Liouville vector.
double run_pass(const PassContext& c, long n, const TiltOptions& o) {
  const Protocol& p = *c.p;
  const double dt = p.tau / static_cast<double>(n);
  const Mat pi0 = p.steady(0.0).pi;
  const int d = static_cast<int>(pi0.rows());
  Vec rho = vectorize(pi0);

  const double node1 = 0.5 - std::sqrt(3.0) / 6.0;
  const double node2 = 0.5 + std::sqrt(3.0) / 6.0;
  const double a1 = 0.25 + std::sqrt(3.0) / 6.0;
  const double a2 = 0.25 - std::sqrt(3.0) / 6.0;

  if (d <= o.dense_dim_max) {
    for (long k = 0; k < n; ++k) {
      const double t0 = static_cast<double>(k) * dt;
      const Mat g1 = dense_generator(c, t0 + node1 * dt);
      const Mat g2 = dense_generator(c, t0 + node2 * dt);
      rho = expm(Mat(dt * (a1 * g1 + a2 * g2))) * rho;
      rho = expm(Mat(dt * (a2 * g1 + a1 * g2))) * rho;
    }
  } else {
    std::vector<int> ks = diag_support(pi0);
    std::vector<int> last_ks;
    std::vector<Eigen::Index> idx;
    for (long k = 0; k < n; ++k) {
      const double t0 = static_cast<double>(k) * dt;
      const BandedStep bs1 = banded_step(c, t0 + node1 * dt);
      const BandedStep bs2 = banded_step(c, t0 + node2 * dt);
      std::vector<int> offs = step_offsets(bs1);
      const std::vector<int> offs2 = step_offsets(bs2);
      offs.insert(offs.end(), offs2.begin(), offs2.end());
      ks = close_diagonals(d, ks, offs);

      int rdim = 0;
      for (int kd : ks) rdim += d - std::abs(kd);
      if (rdim <= kSectorDimMax) {
        if (ks != last_ks) {
          idx = sector_indices(d, ks);
          last_ks = ks;
        }
        const Mat w1 = restricted_generator(bs1, idx);
        const Mat w2 = restricted_generator(bs2, idx);
        const int r = static_cast<int>(idx.size());
        Vec pr(r);
        for (int s = 0; s < r; ++s) pr[s] = rho[idx[s]];
        const Mat wa = a1 * w1 + a2 * w2;
        const Mat wb = a2 * w1 + a1 * w2;
        auto mv = [](const Mat& w) {
          return [&w](const Vec& x, Vec& y) { y.noalias() = w * x; };
        };
        pr = expmv(mv(wa), dt, pr, o.krylov_tol);
        pr = expmv(mv(wb), dt, pr, o.krylov_tol);
        rho.setZero();
        for (int s = 0; s < r; ++s) rho[idx[s]] = pr[s];
      } else {
        auto combo = [&bs1, &bs2](double wa, double wb) {
          return [&bs1, &bs2, wa, wb](const Vec& x, Vec& y) {
            thread_local Vec t2;
            bs1.apply(x, y);
            bs2.apply(x, t2);
            y = wa * y + wb * t2;
          };
        };
        rho = expmv(combo(a1, a2), dt, rho, o.krylov_tol);
        rho = expmv(combo(a2, a1), dt, rho, o.krylov_tol);
      }
    }
  }

  cplx tr = 0.0;
  for (int i = 0; i < d; ++i) tr += rho[static_cast<Eigen::Index>(i) * d + i];
  if (std::abs(tr.imag()) > 1e-8 * std::max(1.0, std::abs(tr.real())))
    throw NumericError("tilted propagation produced a non-real trace");
  return tr.real();
}

MgfValue converge(const PassContext& c, const TiltOptions& o) {
  long n = o.init_steps;
  double prev = run_pass(c, n, o);
  for (int dbl = 0; dbl < o.max_doublings; ++dbl) {
    n *= 2;
    const double cur = run_pass(c, n, o);
    const double change = std::abs(cur - prev);
    if (change <= o.rel_tol * std::max(std::abs(cur), 1e-3)) {
      MgfValue out;
      out.u = c.u;
      out.v = c.v;
      out.g = cur;
      if (cur <= 0.0) throw NumericError("generating function is not positive");
      out.log_g = std::log(cur);
      out.est_err = change;
      out.steps = n;
      return out;
    }
    prev = cur;
  }
  throw NumericError("tilted product integral did not converge within max_doublings");
}

}  // namespace

MgfValue exact_mgf(const Protocol& p, double u, double v, const TiltOptions& o) {
  PassContext c{&p, u, v, false};
  return converge(c, o);
}

MgfValue exact_mgf_entropy(const Protocol& p, double u, const TiltOptions& o) {
  PassContext c{&p, u, 0.0, true};
  return converge(c, o);
}

double cgf_symmetry_residual(const Protocol& p, double u, double v, const TiltOptions& o) {
  const MgfValue a = exact_mgf(p, u, v, o);
  const MgfValue b = exact_mgf(p, 1.0 - u, -v, o);
  return std::abs(a.log_g - b.log_g);
}

// ---- finite-difference cumulants ------------------------------------------------

namespace {

double mean_beta(const Protocol& p) {
  return integrate_gl([&p](double t) { return p.beta(t); }, 0.0, p.tau) / p.tau;
}

}  // namespace

ExactCumulants cumulants_from_mgf(const Protocol& p, double du, double dv,
                                  const TiltOptions& o, bool with_cov) {
  if (!p.thermal) throw ConfigError("joint cumulants require a thermal protocol");
  if (dv <= 0.0) dv = du / mean_beta(p);

  auto K = [&](double u, double v) { return exact_mgf(p, u, v, o).log_g; };

  // 17-point stencil with one Richardson pass (h and 2h)
  const double k00 = K(0, 0);
  const double kp0 = K(du, 0), km0 = K(-du, 0), kp20 = K(2 * du, 0), km20 = K(-2 * du, 0);
  const double k0p = K(0, dv), k0m = K(0, -dv), k0p2 = K(0, 2 * dv), k0m2 = K(0, -2 * dv);

  auto rich = [](double fine, double coarse) { return (4.0 * fine - coarse) / 3.0; };

  const double d1u = rich((kp0 - km0) / (2 * du), (kp20 - km20) / (4 * du));
  const double d1v = rich((k0p - k0m) / (2 * dv), (k0p2 - k0m2) / (4 * dv));
  const double d2u = rich((kp0 - 2 * k00 + km0) / (du * du),
                          (kp20 - 2 * k00 + km20) / (4 * du * du));
  const double d2v = rich((k0p - 2 * k00 + k0m) / (dv * dv),
                          (k0p2 - 2 * k00 + k0m2) / (4 * dv * dv));

  double duv = 0.0;
  if (with_cov) {
    const double kpp = K(du, dv), kpm = K(du, -dv), kmp = K(-du, dv), kmm = K(-du, -dv);
    const double kpp2 = K(2 * du, 2 * dv), kpm2 = K(2 * du, -2 * dv);
    const double kmp2 = K(-2 * du, 2 * dv), kmm2 = K(-2 * du, -2 * dv);
    duv = rich((kpp - kpm - kmp + kmm) / (4 * du * dv),
               (kpp2 - kpm2 - kmp2 + kmm2) / (16 * du * dv));
  }

  ExactCumulants out;
  out.du = du;
  out.dv = dv;
  out.has_cov = with_cov;
  out.mean_sigma = -d1u;
  out.var_sigma = d2u;
  out.mean_wtilde = -d1v;
  out.var_wtilde = d2v;
  out.cov_wtilde_sigma = duv;
  const double w_ad = adiabatic_work(p);
  out.mean_w = out.mean_wtilde + w_ad;
  out.var_w = out.var_wtilde;
  out.ift_gap = std::abs(exact_mgf(p, 1.0, 0.0, o).g - 1.0);
  return out;
}

ExactSigmaCumulants sigma_cumulants_from_mgf(const Protocol& p, double du,
                                             const TiltOptions& o) {
  auto K = [&](double u) { return exact_mgf_entropy(p, u, o).log_g; };
  const double k00 = K(0);
  const double kp = K(du), km = K(-du), kp2 = K(2 * du), km2 = K(-2 * du);
  auto rich = [](double fine, double coarse) { return (4.0 * fine - coarse) / 3.0; };
  ExactSigmaCumulants out;
  out.mean_sigma = -rich((kp - km) / (2 * du), (kp2 - km2) / (4 * du));
  out.var_sigma = rich((kp - 2 * k00 + km) / (du * du), (kp2 - 2 * k00 + km2) / (4 * du * du));
  out.ift_gap = std::abs(exact_mgf_entropy(p, 1.0, o).g - 1.0);
  return out;
}

}  // namespace qjs
