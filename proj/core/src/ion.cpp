// SPDX-License-Identifier: Apache-2.0
#include "qjs/ion.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qjs/quadrature.hpp"

namespace qjs {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CurvePoint {
  double w, dw, b, db;
};

CurvePoint curve_point(const IonParams& p, double t) {
  const double x = t / p.tau;
  CurvePoint c;
  c.w = p.omega0 * (1.0 + 0.5 * std::sin(2 * kPi * x) + 0.25 * std::sin(4 * kPi * x + kPi));
  c.dw = p.omega0 * (kPi / p.tau) * (std::cos(2 * kPi * x) + std::cos(4 * kPi * x + kPi));
  const double bc = 1.0 / p.Tc, bh = 1.0 / p.Th;
  const double s = std::sin(kPi * x);
  c.b = bc + (bh - bc) * s * s;
  c.db = (bh - bc) * (kPi / p.tau) * std::sin(2 * kPi * x);
  return c;
}

Mat ladder(int d) {
  Mat a = Mat::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

}  // namespace

IonCurves ion_curves(const IonParams& p) {
  IonCurves c;
  c.omega = [p](double t) { return curve_point(p, t).w; };
  c.domega = [p](double t) { return curve_point(p, t).dw; };
  c.beta = [p](double t) { return curve_point(p, t).b; };
  c.dbeta = [p](double t) { return curve_point(p, t).db; };
  return c;
}

double ion_truncation_tail(const IonParams& p) {
  // Thermal weight of the top ladder level, maximized along the path (the
  // worst case is the smallest beta*omega).
  const int n_scan = 20000;
  double bw_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n_scan; ++i) {
    const CurvePoint c = curve_point(p, p.tau * i / n_scan);
    bw_min = std::min(bw_min, c.b * c.w);
  }
  return -std::expm1(-bw_min) * std::exp(-bw_min * p.n_max);
}

Protocol ion_protocol(const IonParams& p) {
  if (p.omega0 <= 0 || p.Gamma <= 0 || p.Tc <= 0 || p.Th <= 0 || p.tau <= 0 || p.n_max < 4)
    throw ConfigError("ion parameters must be positive (and n_max >= 4)");
  const double tail = ion_truncation_tail(p);
  if (tail > p.tail_tol) {
    std::ostringstream os;
    os << "ladder truncation inadequate: thermal tail at n_max=" << p.n_max << " is " << tail
       << " > tail_tol=" << p.tail_tol << "; raise n_max or tail_tol";
    throw TruncationInadequateError(os.str());
  }

  const int d = p.n_max + 1;
  const Mat a = ladder(d);
  const Mat adag = a.adjoint();
  const Mat nhat = adag * a;
  const Mat eye = Mat::Identity(d, d);
  const Mat hdir = nhat + 0.5 * eye;            // H / omega
  const Mat squeeze = a * a + adag * adag;      // off-diagonal part of dH / (domega/2)
  const Mat gauge_dir = kI * (adag * adag - a * a);  // Hermitian

  Protocol pr;
  pr.tau = p.tau;
  pr.thermal = true;
  pr.name = "ion";
  pr.model = [p, a, adag, hdir](double t) {
    const CurvePoint c = curve_point(p, t);
    const double N = 1.0 / std::expm1(c.b * c.w);
    ModelSpec m;
    m.H = c.w * hdir;
    m.jumps.push_back({"a", std::sqrt(p.Gamma * (N + 1.0)) * a});
    m.jumps.push_back({"adag", std::sqrt(p.Gamma * N) * adag});
    return m;
  };
  pr.dH = [p, hdir, squeeze](double t) {
    const CurvePoint c = curve_point(p, t);
    return Mat(c.dw * hdir + 0.5 * c.dw * squeeze);
  };
  pr.gauge = [p, gauge_dir](double t) {
    const CurvePoint c = curve_point(p, t);
    return Mat((c.dw / (4.0 * c.w)) * gauge_dir);
  };
  pr.beta = [p](double t) { return curve_point(p, t).b; };
  pr.dbeta = [p](double t) { return curve_point(p, t).db; };
  return pr;
}

IonClosedForm ion_closed_form(const IonParams& p, double quad_tol) {
  const double G = p.Gamma;
  const auto integrate = [&](const std::function<double(double)>& f) {
    return integrate_adaptive(f, 0.0, p.tau, quad_tol);
  };

  IonClosedForm r;
  r.adiabatic_work = integrate([&](double t) {
    const CurvePoint c = curve_point(p, t);
    return c.dw / std::expm1(c.b * c.w);
  });
  r.mean_w_excess = integrate([&](double t) {
    const CurvePoint c = curve_point(p, t);
    const double e = std::exp(c.b * c.w), g2 = G * G + 4 * c.w * c.w;
    return c.dw * e *
           (c.w * g2 * (c.db * c.w + c.b * c.dw) + G * G * c.dw * std::sinh(c.b * c.w)) /
           (G * c.w * (e - 1) * (e - 1) * g2);
  });
  r.var_w = integrate([&](double t) {
    const CurvePoint c = curve_point(p, t);
    const double e = std::exp(c.b * c.w), g2 = G * G + 4 * c.w * c.w;
    return 2 * c.dw * c.dw * e * (g2 + G * G * std::cosh(c.b * c.w)) /
           ((e - 1) * (e - 1) * G * g2);
  });
  r.mean_sigma = integrate([&](double t) {
    const CurvePoint c = curve_point(p, t);
    const double e = std::exp(c.b * c.w), g2 = G * G + 4 * c.w * c.w;
    const double drive = c.db * c.w + c.b * c.dw;
    return e *
           (c.b * G * G * c.dw * c.dw * std::sinh(c.b * c.w) + c.w * g2 * drive * drive) /
           (G * c.w * (e - 1) * (e - 1) * g2);
  });
  r.var_sigma = integrate([&](double t) {
    const CurvePoint c = curve_point(p, t);
    const double e = std::exp(c.b * c.w), g2 = G * G + 4 * c.w * c.w;
    const double drive = c.db * c.w + c.b * c.dw;
    return 2 * e *
           (c.w * c.b * c.b * G * G * c.dw * c.dw * std::cosh(c.b * c.w) +
            c.w * g2 * drive * drive) /
           (G * c.w * (e - 1) * (e - 1) * g2);
  });
  r.two_dI_sigma = integrate([&](double t) {
    const CurvePoint c = curve_point(p, t);
    const double e = std::exp(c.b * c.w), g2 = G * G + 4 * c.w * c.w;
    const double bw = c.b * c.w;
    return c.b * c.dw * c.dw * G * (std::exp(2 * bw) - 1) * (bw / std::tanh(bw) - 1) /
           (c.w * (e - 1) * (e - 1) * g2);
  });
  r.dI_w = integrate([&](double t) {
            const CurvePoint c = curve_point(p, t);
            const double e = std::exp(c.b * c.w), g2 = G * G + 4 * c.w * c.w;
            const double bw = c.b * c.w;
            return c.dw * c.dw * G * (std::exp(2 * bw) - 1) * (bw / std::tanh(bw) - 1) /
                   (2 * c.b * c.w * (e - 1) * (e - 1) * g2);
          }) /
          p.tau;
  r.tur_ratio = r.var_w * r.mean_sigma / (r.mean_w_excess * r.mean_w_excess);
  r.fdr_gap = r.var_sigma - 2 * r.mean_sigma;
  return r;
}

double ion_cgf_slow(const IonParams& p, double u, double v, double quad_tol) {
  const double G = p.Gamma;
  const double val = integrate_adaptive(
      [&](double t) {
        const CurvePoint c = curve_point(p, t);
        const double e = std::exp(c.b * c.w);
        const double em = (e - 1) * (e - 1);
        const double T = 1.0 / c.b;
        const double y = u + T * v;
        const double g2 = G * G + 4 * c.w * c.w;
        const double cbar =
            c.dw * c.dw * e / em *
            (-G * std::sinh(c.b * (y - 1) * c.w) * std::sinh(c.b * y * c.w) /
                 (c.b * c.b * c.w * c.w * g2) +
             y * (1 - y) / G);
        const double c0_hh = (c.w * c.w / G) * e / em;
        const double c0_dhh = (c.w * c.dw / G) * e / em;
        const double fT = T * v - 2 * u * (u + T * v - 1);
        return c.b * c.b * cbar + (u - u * u) * c.db * c.db * c0_hh +
               fT * c.db * c.b * c0_dhh;
      },
      0.0, p.tau, quad_tol);
  return -val;
}

std::vector<Fig1Row> fig1_sweep(const IonParams& base, int n_teq, int n_tc, double teq_min,
                                double teq_max, double tc_min, double tc_max) {
  if (n_teq < 2 || n_tc < 2) throw ConfigError("fig1 sweep needs at least a 2x2 grid");
  std::vector<Fig1Row> rows;
  rows.reserve(static_cast<size_t>(n_teq) * n_tc);
  const double lmin = std::log(teq_min), lmax = std::log(teq_max);
  for (int i = 0; i < n_teq; ++i) {
    const double teq = std::exp(lmin + (lmax - lmin) * i / (n_teq - 1));
    for (int j = 0; j < n_tc; ++j) {
      const double tc = tc_min + (tc_max - tc_min) * j / (n_tc - 1);
      IonParams q = base;
      q.Gamma = 1.0 / teq;
      q.Tc = tc;
      q.Th = 2.0 * tc;
      const IonClosedForm c = ion_closed_form(q, 1e-12);
      Fig1Row row;
      row.t_eq = teq;
      row.Tc = tc;
      row.tur_ratio = c.tur_ratio;
      row.fdr_gap = c.fdr_gap;
      row.mean_w = c.adiabatic_work + c.mean_w_excess;
      row.var_w = c.var_w;
      row.mean_sigma = c.mean_sigma;
      row.var_sigma = c.var_sigma;
      row.adiabatic_work = c.adiabatic_work;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace qjs
