// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "qjs/ion.hpp"
#include "qjs/quadrature.hpp"
#include "qjs/slow_driving.hpp"

using namespace qjs;

namespace {

Mat pauli_x() {
  Mat sx(2, 2);
  sx << 0, 1, 1, 0;
  return sx;
}

}  // namespace

TEST_CASE("static kernels match frozen reference values") {
  Mat pi = Mat::Zero(2, 2);
  pi(0, 0) = 0.75;
  pi(1, 1) = 0.25;
  const Mat sx = pauli_x();
  CHECK(skew_covariance(pi, sx, sx) ==
        doctest::Approx(8.976077337316268e-02).epsilon(1e-12));
  CHECK(qcov(pi, sx, sx, 0.5) == doctest::Approx(8.660254037844386e-01).epsilon(1e-12));
  // s in {0,1} gives the plain covariance; skew = qcov average deficit
  CHECK(qcov(pi, sx, sx, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(qcov(pi, sx, sx, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("green-paired kernels: frozen qubit value and consistency identities") {
  const double omega = 1.3, beta = 0.7, Gamma = 0.3;
  const double N = 1.0 / std::expm1(beta * omega);
  Mat h(2, 2), sm = Mat::Zero(2, 2), sp = Mat::Zero(2, 2);
  h << 0.5 * omega, 0, 0, -0.5 * omega;
  sm(1, 0) = 1.0;
  sp(0, 1) = 1.0;
  ModelSpec m;
  m.H = h;
  m.jumps.push_back({"down", std::sqrt(Gamma * (N + 1)) * sm});
  m.jumps.push_back({"up", std::sqrt(Gamma * N) * sp});
  const SteadyState ss = steady_state(m);
  const GreenFrame gf(m, ss);

  CHECK(gf.corr(m.H, m.H, 0.0) == doctest::Approx(4.910736826426367e-01).epsilon(1e-10));

  // corr_int equals the numerical s-average of corr
  const Mat sx = pauli_x();
  const Mat a = Mat(m.H + 0.4 * sx);
  const double direct = gf.corr_int(a, a);
  const double quad = integrate_gl([&](double s) { return gf.corr(a, a, s); }, 0.0, 1.0);
  CHECK(direct == doctest::Approx(quad).epsilon(1e-11));

  // skew_green = (corr(1)+corr(0))/2 - corr_int
  const double skew = gf.skew_green(a, a);
  CHECK(skew == doctest::Approx(0.5 * (gf.corr(a, a, 1.0) + gf.corr(a, a, 0.0)) -
                                direct)
                    .epsilon(1e-11));

  // flat weight at y=1: Cbar vanishes
  CHECK(std::abs(gf.corr_bar(a, a, 1.0)) < 1e-13);
}

TEST_CASE("slow cumulants on the driven qubit: identities and inequalities") {
  QubitDriveParams q;
  q.theta_max = 0.7;  // coherent drive
  const Protocol p = qubit_protocol(q);
  const CumulantReport r = cumulants_slow(p);

  CHECK(r.mean_sigma > 0.0);
  CHECK(r.dI_sigma > 0.0);                         // coherence correction
  CHECK(std::abs(r.fdr_residual) < 1e-10);         // var = 2(mean + dI)
  CHECK(r.fdr_gap == doctest::Approx(2.0 * r.dI_sigma).epsilon(1e-9));
  CHECK(r.tur_ratio >= 2.0);

  QubitDriveParams qc;
  qc.theta_max = 0.0;  // commuting drive: classical limit
  const CumulantReport rc = cumulants_slow(qubit_protocol(qc));
  CHECK(std::abs(rc.dI_sigma) < 1e-10);
  CHECK(std::abs(rc.fdr_gap) < 1e-10);
  CHECK(rc.tur_ratio >= 2.0);

  // doubling the quadrature changes nothing at these smooth parameters
  SlowOptions so;
  so.check_doubling = true;
  const CumulantReport rd = cumulants_slow(p, so);
  CHECK(rd.quad_delta < 1e-10);
}

TEST_CASE("closed slow CGF: symmetry, zeros, and detailed-balance gate") {
  QubitDriveParams q;
  q.theta_max = 0.4;
  const Protocol p = qubit_protocol(q);

  const double beta_bar =
      integrate_gl([&](double t) { return p.beta(t); }, 0.0, p.tau) / p.tau;
  const double u = 0.3, v = 0.2 * beta_bar;
  CHECK(std::abs(cgf_joint_slow(p, u, v) - cgf_joint_slow(p, 1.0 - u, -v)) < 1e-10);
  CHECK(std::abs(cgf_joint_slow(p, 1.0, 0.0)) < 1e-12);  // slow IFT
  CHECK(std::abs(cgf_joint_slow(p, 0.0, 0.0)) < 1e-14);
  CHECK(cgf_joint_slow(p, 0.5, 0.0) < 0.0);

  // marginal-sigma CGF agrees with the joint one at v = 0 (thermal + DB)
  CHECK(cgf_entropy_slow(p, 0.35) == doctest::Approx(cgf_joint_slow(p, 0.35, 0.0))
                                         .epsilon(1e-9));

  // privileged but non-detailed-balanced thermal family: gate must throw,
  // explicit override must pass
  Mat h = Mat::Zero(3, 3);
  h(1, 1) = 1.1;
  h(2, 2) = 2.3;
  const double beta = 1.0;
  RVec pr(3);
  for (int i = 0; i < 3; ++i) pr[i] = std::exp(-beta * h(i, i).real());
  pr /= pr.sum();
  ModelSpec cyc;
  cyc.H = h;
  const double kappa = 0.8, J = 0.4;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      Mat dn = Mat::Zero(3, 3), up = Mat::Zero(3, 3);
      dn(a, b) = 1.0;
      up(b, a) = 1.0;
      const double r = std::sqrt(pr[a] / pr[b]);
      cyc.jumps.push_back({"d", std::sqrt(kappa * r) * dn});
      cyc.jumps.push_back({"u", std::sqrt(kappa / r) * up});
    }
  for (int a = 0; a < 3; ++a) {  // cycle 0 -> 1 -> 2 -> 0 breaks detailed balance
    const int b = (a + 1) % 3;
    Mat c = Mat::Zero(3, 3);
    c(b, a) = 1.0;
    cyc.jumps.push_back({"c", std::sqrt(J / pr[a]) * c});
  }
  Protocol pc;
  pc.tau = 10.0;
  pc.thermal = true;
  pc.model = [cyc](double) { return cyc; };
  pc.dH = [](double) { return Mat::Zero(3, 3); };
  pc.beta = [beta](double) { return beta; };
  pc.dbeta = [](double) { return 0.0; };
  CHECK_THROWS_AS((void)cgf_joint_slow(pc, 0.3, 0.1), NoDetailedBalanceError);
  SlowOptions open;
  open.require_detailed_balance = false;
  CHECK(std::abs(cgf_joint_slow(pc, 0.3, 0.1, open)) < 1e-12);  // frozen: no driving
}

TEST_CASE("ion curves, truncation gate, and structure") {
  IonParams ip;  // fig. 1 parameters
  CHECK(ion_truncation_tail(ip) == doctest::Approx(3.480e-05).epsilon(2e-3));
  CHECK_THROWS_AS((void)ion_protocol(ip), TruncationInadequateError);

  IonParams big = ip;
  big.omega0 = 3.0;
  CHECK(ion_truncation_tail(big) == doctest::Approx(2.751e-12).epsilon(2e-3));
  const Protocol p = ion_protocol(big);  // passes the default 1e-8 gate

  const double t = 0.37 * p.tau;
  const ModelSpec m = p.model(t);
  const SteadyState ss = p.steady(t);
  const PrivilegedStructure st = check_structure(m, ss);
  CHECK(st.privileged);
  CHECK(st.detailed_balance);
  const double bw = p.beta(t) * (m.H(1, 1).real() - m.H(0, 0).real());
  REQUIRE(st.dphi.size() == 2);
  CHECK(st.dphi[0] == doctest::Approx(-bw).epsilon(1e-8));
  CHECK(st.dphi[1] == doctest::Approx(bw).epsilon(1e-8));
}

TEST_CASE("ion closed forms against independently frozen quadrature values") {
  IonParams ip;  // omega0 = Gamma = Tc = 1, Th = 2, tau = 100
  const IonClosedForm r = ion_closed_form(ip);
  CHECK(r.adiabatic_work == doctest::Approx(-9.756082507093586e-01).epsilon(1e-9));
  CHECK(r.mean_w_excess == doctest::Approx(3.450568186819386e-01).epsilon(1e-9));
  CHECK(r.var_w == doctest::Approx(1.203831730989816e+00).epsilon(1e-9));
  CHECK(r.mean_sigma == doctest::Approx(2.364919675461459e-01).epsilon(1e-9));
  CHECK(r.var_sigma == doctest::Approx(4.797333438143812e-01).epsilon(1e-9));
  CHECK(r.two_dI_sigma == doctest::Approx(6.749408722089323e-03).epsilon(1e-8));
  CHECK(r.dI_w == doctest::Approx(8.135432345396228e-05).epsilon(1e-8));
  CHECK(r.tur_ratio == doctest::Approx(2.391117693169049e+00).epsilon(1e-9));
  CHECK(r.fdr_gap == doctest::Approx(6.749408722089290e-03).epsilon(1e-8));

  IonParams big = ip;
  big.omega0 = 3.0;
  const IonClosedForm rb = ion_closed_form(big);
  CHECK(rb.adiabatic_work == doctest::Approx(-7.760342593132893e-01).epsilon(1e-9));
  CHECK(rb.mean_w_excess == doctest::Approx(2.375692303774927e-01).epsilon(1e-9));
  CHECK(rb.var_w == doctest::Approx(8.495156473536830e-01).epsilon(1e-9));
  CHECK(rb.mean_sigma == doctest::Approx(1.642883255306670e-01).epsilon(1e-9));
  CHECK(rb.var_sigma == doctest::Approx(3.388505115764459e-01).epsilon(1e-9));
  CHECK(rb.two_dI_sigma == doctest::Approx(1.027386051511209e-02).epsilon(1e-8));
  CHECK(rb.dI_w == doctest::Approx(1.231940686898575e-04).epsilon(1e-8));
}

TEST_CASE("ion closed-form CGF: frozen values and exact symmetry") {
  IonParams ip;
  CHECK(ion_cgf_slow(ip, 0.2, 0.1) ==
        doctest::Approx(-5.243264251678514e-02).epsilon(1e-9));
  CHECK(ion_cgf_slow(ip, 0.3, 0.2) ==
        doctest::Approx(-5.333271680912982e-02).epsilon(1e-9));
  CHECK(ion_cgf_slow(ip, 0.2, 0.1) ==
        doctest::Approx(ion_cgf_slow(ip, 0.8, -0.1)).epsilon(1e-11));
  CHECK(std::abs(ion_cgf_slow(ip, 1.0, 0.0)) < 1e-12);
}

TEST_CASE("numeric ion twin reproduces the closed-form kernels") {
  IonParams ip;
  ip.tail_tol = 1e-4;  // fig. 1 parameters need the loosened gate at n_max=40
  const Protocol p = ion_protocol(ip);
  const double t = 0.37 * p.tau;
  const ModelSpec m = p.model(t);
  const SteadyState ss = p.steady(t);
  const GreenFrame gf(m, ss);

  const double w = m.H(1, 1).real() - m.H(0, 0).real();
  const double b = p.beta(t);
  const double e = std::exp(b * w), G = ip.Gamma;

  // C^(0)(H,H) = (w^2/G) e^{bw}/(e^{bw}-1)^2
  CHECK(gf.corr(m.H, m.H, 0.0) ==
        doctest::Approx((w * w / G) * e / ((e - 1) * (e - 1))).epsilon(1e-4));

  // Cbar^(y)(dH,dH) closed form (quadrature-pair + number parts)
  const Mat dh = p.dH(t);
  const double dwdt = dh(1, 1).real() - dh(0, 0).real();
  for (double y : {0.25, 0.6}) {
    const double closed =
        dwdt * dwdt * e / ((e - 1) * (e - 1)) *
        (-G * std::sinh(b * (y - 1) * w) * std::sinh(b * y * w) /
             (b * b * w * w * (G * G + 4 * w * w)) +
         y * (1 - y) / G);
    CHECK(gf.corr_bar(dh, dh, y) == doctest::Approx(closed).epsilon(1e-4));
  }

  // detailed-balance symmetry of the mixed Green kernel
  CHECK(gf.corr(dh, m.H, 0.0) == doctest::Approx(gf.corr(m.H, dh, 0.0)).epsilon(1e-8));
}
