// SPDX-License-Identifier: Apache-2.0
#include "qjs/slow_driving.hpp"

#include <cmath>

#include "qjs/quadrature.hpp"

namespace qjs {

namespace {

Mat centered(const Mat& a, const Mat& pi) {
  return a - (pi * a).trace() * Mat::Identity(a.rows(), a.cols());
}

// The log-form weights below divide by powers of L = ln(p_j/p_i); inside
// |L| < 1e-3 they switch to series in L, which keeps the relative rounding
// error at ~1e-10 on both sides of the cut.

// logarithmic mean of two positive numbers given also their logs
double log_mean(double x, double y, double lx, double ly) {
  const double L = ly - lx;  // y = x e^L
  if (std::abs(L) < 1e-3)
    return x * (1.0 + L * (0.5 + L * (1.0 / 6 + L * (1.0 / 24 + L / 120))));
  return (y - x) / L;
}

// (p_i + p_j)/2 - LM(p_i, p_j): the skew (Wigner-Yanase-like) weight
double skew_weight(double x, double y, double lx, double ly) {
  const double L = ly - lx;
  if (std::abs(L) < 1e-3)
    return x * L * L * (1.0 / 12 + L * (1.0 / 24 + L / 80.0));
  return 0.5 * (x + y) - (y - x) / L;
}

// Cbar weight W_y(p_i, p_j) = [p_i + p_j - p_i^(1-y) p_j^y - p_i^y p_j^(1-y)]
// / ln(p_j/p_i)^2, with a series fallback for nearly equal weights.
double cbar_weight(double pi_, double pj, double li, double lj, double y) {
  const double L = lj - li;
  if (std::abs(L) < 1e-3) {
    // sum_{k>=2} L^(k-2) (1 - y^k - (1-y)^k) / k!
    double f = 0.0, lk = 1.0, fact = 2.0, yk = y * y, zk = (1 - y) * (1 - y);
    for (int k = 2; k <= 9; ++k) {
      f += lk * (1.0 - yk - zk) / fact;
      lk *= L;
      fact *= (k + 1);
      yk *= y;
      zk *= (1 - y);
    }
    return pi_ * f;
  }
  const double a = std::exp((1 - y) * li + y * lj);
  const double b = std::exp(y * li + (1 - y) * lj);
  return (pi_ + pj - a - b) / (L * L);
}

}  // namespace

double qcov(const Mat& pi, const Mat& a, const Mat& b, double s) {
  const SpectralDecomp pd = SpectralDecomp::hermitian(pi);
  const Mat ab = pd.evec.adjoint() * centered(a, pi) * pd.evec;
  const Mat bb = pd.evec.adjoint() * centered(b, pi) * pd.evec;
  const int d = static_cast<int>(pi.rows());
  cplx acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double w = std::pow(std::max(pd.eval[i], kPositivityFloor), s) *
                       std::pow(std::max(pd.eval[j], kPositivityFloor), 1.0 - s);
      acc += w * ab(i, j) * bb(j, i);
    }
  return acc.real();
}

double skew_covariance(const Mat& pi, const Mat& a, const Mat& b) {
  const SpectralDecomp pd = SpectralDecomp::hermitian(pi);
  const Mat ab = pd.evec.adjoint() * centered(a, pi) * pd.evec;
  const Mat bb = pd.evec.adjoint() * centered(b, pi) * pd.evec;
  const int d = static_cast<int>(pi.rows());
  cplx acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double piv = std::max(pd.eval[i], kPositivityFloor);
      const double pjv = std::max(pd.eval[j], kPositivityFloor);
      acc += skew_weight(piv, pjv, std::log(piv), std::log(pjv)) * ab(i, j) * bb(j, i);
    }
  return acc.real();
}

// ---- GreenFrame ----------------------------------------------------------------

struct GreenFrame::Paired {
  Mat y, b;  // Green-solved A and centred B, both in the pi eigenbasis
};

GreenFrame::GreenFrame(const ModelSpec& m, const SteadyState& ss, double sector_tol)
    : ss_(ss), solver_(m, ss, RestrictedSolver::Side::Adjoint, sector_tol) {}

GreenFrame::Paired GreenFrame::pair(const Mat& a, const Mat& b) const {
  const Mat da = centered(a, ss_.pi);
  const Mat db = centered(b, ss_.pi);
  const Mat y = solver_.solve(Mat(-da));
  Paired pr;
  pr.y = ss_.spec.evec.adjoint() * y * ss_.spec.evec;
  pr.b = ss_.spec.evec.adjoint() * db * ss_.spec.evec;
  return pr;
}

double GreenFrame::corr(const Mat& a, const Mat& b, double s) const {
  const Paired pr = pair(a, b);
  const int d = static_cast<int>(pr.y.rows());
  cplx acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double w = std::pow(std::max(ss_.spec.eval[j], kPositivityFloor), s) *
                       std::pow(std::max(ss_.spec.eval[i], kPositivityFloor), 1.0 - s);
      acc += w * pr.y(i, j) * pr.b(j, i);
    }
  return acc.real();
}

double GreenFrame::corr_int(const Mat& a, const Mat& b) const {
  const Paired pr = pair(a, b);
  const int d = static_cast<int>(pr.y.rows());
  cplx acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double piv = std::max(ss_.spec.eval[i], kPositivityFloor);
      const double pjv = std::max(ss_.spec.eval[j], kPositivityFloor);
      acc += log_mean(piv, pjv, std::log(piv), std::log(pjv)) * pr.y(i, j) * pr.b(j, i);
    }
  return acc.real();
}

double GreenFrame::corr_bar(const Mat& a, const Mat& b, double y) const {
  const Paired pr = pair(a, b);
  const int d = static_cast<int>(pr.y.rows());
  cplx acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double piv = std::max(ss_.spec.eval[i], kPositivityFloor);
      const double pjv = std::max(ss_.spec.eval[j], kPositivityFloor);
      acc += cbar_weight(piv, pjv, std::log(piv), std::log(pjv), y) * pr.y(i, j) * pr.b(j, i);
    }
  return acc.real();
}

double GreenFrame::skew_green(const Mat& a, const Mat& b) const {
  const Paired pr = pair(a, b);
  const int d = static_cast<int>(pr.y.rows());
  cplx acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double piv = std::max(ss_.spec.eval[i], kPositivityFloor);
      const double pjv = std::max(ss_.spec.eval[j], kPositivityFloor);
      acc += skew_weight(piv, pjv, std::log(piv), std::log(pjv)) * pr.y(i, j) * pr.b(j, i);
    }
  return acc.real();
}

// ---- time-integrated cumulants ---------------------------------------------------

namespace {

struct FrameData {
  GreenFrame gf;
  Mat phidot, dh, h;
  double beta = 0.0, dbeta = 0.0;
};

FrameData make_frame(const Protocol& p, double t, double sector_tol) {
  const ModelSpec m = p.model(t);
  const SteadyState ss = p.steady(t);
  FrameData f{GreenFrame(m, ss, sector_tol), {}, {}, {}, 0.0, 0.0};
  f.h = m.H;
  if (p.thermal) {
    f.beta = p.beta(t);
    f.dbeta = p.dbeta(t);
    f.dh = p.dH(t);
    f.phidot = f.dbeta * centered(m.H, ss.pi) + f.beta * centered(f.dh, ss.pi);
  } else {
    if (!p.phidot_fn)
      throw ConfigError("slow-driving sigma statistics on a non-thermal protocol need phidot_fn");
    f.phidot = centered(p.phidot_fn(t), ss.pi);
    if (p.dH) f.dh = p.dH(t);
  }
  return f;
}

// composite Gauss-Legendre sweep: calls fn(t, weight) on every node
void gl_sweep(double tau, int panels, int ppp,
              const std::function<void(double, double)>& fn) {
  thread_local int cached_n = -1;
  thread_local GaussLegendre* rule = nullptr;
  if (cached_n != ppp) {
    delete rule;
    rule = new GaussLegendre(ppp);
    cached_n = ppp;
  }
  const double hp = tau / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * hp, half = 0.5 * hp;
    for (int i = 0; i < ppp; ++i) fn(mid + half * rule->x[i], half * rule->w[i]);
  }
}

CumulantReport accumulate_cumulants(const Protocol& p, const SlowOptions& o, int panels) {
  CumulantReport r;
  if (p.thermal) {
    r.adiabatic_work = adiabatic_work(p);
    r.dF = delta_F(p);
  }
  double mean_w_excess = 0.0;
  gl_sweep(p.tau, panels, o.points_per_panel, [&](double t, double wt) {
    const FrameData f = make_frame(p, t, o.sector_tol);
    r.mean_sigma += wt * f.gf.corr_int(f.phidot, f.phidot);
    r.var_sigma += wt * (f.gf.corr(f.phidot, f.phidot, 1.0) + f.gf.corr(f.phidot, f.phidot, 0.0));
    r.dI_sigma += wt * f.gf.skew_green(f.phidot, f.phidot);
    if (p.thermal) {
      mean_w_excess += wt * f.gf.corr_int(f.dh, f.phidot);
      r.var_w += wt * (f.gf.corr(f.dh, f.dh, 1.0) + f.gf.corr(f.dh, f.dh, 0.0));
      r.dI_w += wt * f.gf.skew_green(f.dh, f.dh);
    }
  });
  r.mean_w = r.adiabatic_work + mean_w_excess;
  r.dI_w /= p.tau;
  if (p.thermal && mean_w_excess != 0.0)
    r.tur_ratio = r.var_w * r.mean_sigma / (mean_w_excess * mean_w_excess);
  r.fdr_residual = r.var_sigma - 2.0 * (r.mean_sigma + r.dI_sigma);
  r.fdr_gap = r.var_sigma - 2.0 * r.mean_sigma;
  return r;
}

void require_structure(const Protocol& p, const SlowOptions& o, bool need_db) {
  const double t = 0.37 * p.tau;  // generic interior time
  const ModelSpec m = p.model(t);
  const SteadyState ss = p.steady(t);
  const PrivilegedStructure st = check_structure(m, ss);
  if (!st.privileged)
    throw NotPrivilegedError("slow-driving formulas need a privileged jump representation");
  if (need_db && o.require_detailed_balance && !st.detailed_balance)
    throw NoDetailedBalanceError(
        "closed slow CGF requires detailed balance (or disable the gate explicitly)");
}

}  // namespace

CumulantReport cumulants_slow(const Protocol& p, const SlowOptions& o) {
  require_structure(p, o, false);
  CumulantReport r = accumulate_cumulants(p, o, o.panels);
  if (o.check_doubling) {
    const CumulantReport r2 = accumulate_cumulants(p, o, 2 * o.panels);
    r.quad_delta = std::abs(r2.mean_sigma - r.mean_sigma) + std::abs(r2.var_sigma - r.var_sigma) +
                   std::abs(r2.mean_w - r.mean_w) + std::abs(r2.var_w - r.var_w);
  }
  return r;
}

double cgf_joint_slow(const Protocol& p, double u, double v, const SlowOptions& o) {
  if (!p.thermal) throw ConfigError("joint slow CGF requires a thermal protocol");
  require_structure(p, o, true);
  double acc = 0.0;
  gl_sweep(p.tau, o.panels, o.points_per_panel, [&](double t, double wt) {
    const FrameData f = make_frame(p, t, o.sector_tol);
    const double T = 1.0 / f.beta;
    const double y = u + T * v;
    const double fT = T * v - 2.0 * u * (u + T * v - 1.0);
    double val = f.beta * f.beta * f.gf.corr_bar(f.dh, f.dh, y);
    val += (u - u * u) * f.dbeta * f.dbeta * f.gf.corr(f.h, f.h, 0.0);
    val += fT * f.dbeta * f.beta * f.gf.corr(f.dh, f.h, 0.0);
    acc += wt * val;
  });
  return -acc;
}

double cgf_entropy_slow(const Protocol& p, double u, const SlowOptions& o) {
  require_structure(p, o, false);
  double acc = 0.0;
  gl_sweep(p.tau, o.panels, o.points_per_panel, [&](double t, double wt) {
    const FrameData f = make_frame(p, t, o.sector_tol);
    acc += wt * f.gf.corr_bar(f.phidot, f.phidot, u);
  });
  return -acc;
}

}  // namespace qjs
