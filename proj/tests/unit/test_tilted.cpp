// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qjs/ion.hpp"
#include "qjs/slow_driving.hpp"
#include "qjs/tilted.hpp"

using namespace qjs;

namespace {

Mat centered(const Mat& a, const Mat& pi) {
  return a - (pi * a).trace() * Mat::Identity(a.rows(), a.cols());
}

// Frequency-chirped truncated ladder in a fixed basis: H(t) = omega(t) N is
// diagonal and the jumps are single-banded, so the tilted propagation closes
// on the main diagonal and exercises the restricted-sector path.
Protocol chirped_ladder(int d, double tau) {
  const double omega0 = 1.0, beta0 = 0.8, Gamma = 1.0;
  Mat num = Mat::Zero(d, d);
  Mat low = Mat::Zero(d, d);
  for (int n = 0; n < d; ++n) num(n, n) = n;
  for (int n = 1; n < d; ++n) low(n - 1, n) = std::sqrt(static_cast<double>(n));

  auto omega = [=](double t) { return omega0 * (1.0 + 0.3 * std::sin(std::numbers::pi * t / tau)); };
  auto domega = [=](double t) {
    return omega0 * 0.3 * (std::numbers::pi / tau) * std::cos(std::numbers::pi * t / tau);
  };

  Protocol p;
  p.tau = tau;
  p.thermal = true;
  p.name = "chirped-ladder";
  p.beta = [=](double t) { return beta0 * (1.0 + 0.2 * std::sin(std::numbers::pi * t / tau)); };
  p.dbeta = [=](double t) { return beta0 * 0.2 * (std::numbers::pi / tau) * std::cos(std::numbers::pi * t / tau); };
  p.model = [=, bf = p.beta](double t) {
    const double nb = 1.0 / std::expm1(bf(t) * omega(t));
    ModelSpec m;
    m.H = omega(t) * num;
    m.jumps.push_back({"down", std::sqrt(Gamma * (nb + 1.0)) * low});
    m.jumps.push_back({"up", std::sqrt(Gamma * nb) * Mat(low.adjoint())});
    return m;
  };
  p.dH = [=](double t) { return Mat(domega(t) * num); };
  return p;
}

}  // namespace

TEST_CASE("entropy tilt coincides with the joint tilt at v = 0 on thermal states") {
  QubitDriveParams q;
  q.theta_max = 0.6;
  const Protocol p = qubit_protocol(q);
  const double t = 0.31 * p.tau;
  const ModelSpec m = p.model(t);
  const SteadyState ss = p.steady(t);
  const double beta = p.beta(t), dbeta = p.dbeta(t);
  const Mat dh = p.dH(t);
  const Mat phidot = dbeta * centered(m.H, ss.pi) + beta * centered(dh, ss.pi);

  for (double u : {0.3, 1.0, -0.4}) {
    const Mat a = joint_tilt(m.H, dh, ss.pi, beta, dbeta, u, 0.0);
    const Mat b = entropy_tilt(ss.pi, phidot, u);
    CHECK((a - b).norm() < 1e-11 * (1.0 + a.norm()));
  }

  // u = v = 0: no tilt at all
  CHECK(joint_tilt(m.H, dh, ss.pi, beta, dbeta, 0.0, 0.0).norm() < 1e-13);
}

TEST_CASE("exact MGF: normalization and integral fluctuation theorem") {
  QubitDriveParams q;
  q.tau = 10.0;
  q.theta_max = 0.5;
  const Protocol p = qubit_protocol(q);

  TiltOptions o;
  const MgfValue norm = exact_mgf(p, 0.0, 0.0, o);
  CHECK(std::abs(norm.g - 1.0) < 1e-10);

  const MgfValue ift = exact_mgf(p, 1.0, 0.0, o);
  CHECK(std::abs(ift.g - 1.0) < 1e-8);

  // a genuinely tilted point lies below 1 (Jensen: <e^{-u sigma}> < 1 for
  // 0 < u < 1 with positive dissipation)
  const MgfValue mid = exact_mgf(p, 0.5, 0.0, o);
  CHECK(mid.g < 1.0);
  CHECK(mid.g > 0.5);
}

TEST_CASE("integral FT on the chirped ladder (restricted-sector propagation)") {
  const Protocol p = chirped_ladder(12, 15.0);
  TiltOptions o;
  const MgfValue norm = exact_mgf(p, 0.0, 0.0, o);
  CHECK(std::abs(norm.g - 1.0) < 1e-9);
  const MgfValue ift = exact_mgf(p, 1.0, 0.0, o);
  CHECK(std::abs(ift.g - 1.0) < 1e-7);
}

TEST_CASE("integral FT on a small oscillator (full Krylov propagation)") {
  IonParams ip;
  ip.n_max = 12;
  ip.tau = 10.0;
  ip.tail_tol = 0.05;
  const Protocol p = ion_protocol(ip);
  TiltOptions o;
  const MgfValue norm = exact_mgf(p, 0.0, 0.0, o);
  CHECK(std::abs(norm.g - 1.0) < 1e-9);
  const MgfValue ift = exact_mgf(p, 1.0, 0.0, o);
  CHECK(std::abs(ift.g - 1.0) < 1e-7);
}

TEST_CASE("frozen protocol has identically unit MGF") {
  QubitDriveParams q;
  q.amp1 = q.amp2 = 0.0;
  q.beta_h = q.beta_c;
  q.theta_max = 0.0;
  q.tau = 3.0;
  const Protocol p = qubit_protocol(q);
  const MgfValue g = exact_mgf(p, 0.7, 0.3, {});
  CHECK(std::abs(g.g - 1.0) < 1e-10);
}

TEST_CASE("exact finite-difference cumulants agree with slow driving at large tau") {
  QubitDriveParams q;
  q.tau = 50.0;
  q.theta_max = 0.5;
  const Protocol p = qubit_protocol(q);

  const ExactCumulants ec = cumulants_from_mgf(p);
  const CumulantReport sc = cumulants_slow(p);

  CHECK(ec.ift_gap < 1e-8);
  CHECK(ec.mean_sigma == doctest::Approx(sc.mean_sigma).epsilon(0.05));
  CHECK(ec.var_sigma == doctest::Approx(sc.var_sigma).epsilon(0.05));
  CHECK(ec.mean_w == doctest::Approx(sc.mean_w).epsilon(0.05));
  CHECK(ec.var_w == doctest::Approx(sc.var_w).epsilon(0.05));
  // w-tilde relates to w by the adiabatic shift
  CHECK(ec.mean_w == doctest::Approx(ec.mean_wtilde + adiabatic_work(p)).epsilon(1e-12));
}

TEST_CASE("entropy-marginal MGF on the synthetic non-thermal qutrit") {
  SyntheticQutritParams s;
  s.tau = 30.0;
  const Protocol p = synthetic_qutrit_protocol(s);

  const ExactSigmaCumulants ec = sigma_cumulants_from_mgf(p);
  CHECK(ec.ift_gap < 1e-8);
  CHECK(ec.mean_sigma > 0.0);

  const CumulantReport sc = cumulants_slow(p);
  CHECK(ec.mean_sigma == doctest::Approx(sc.mean_sigma).epsilon(0.08));
  CHECK(ec.var_sigma == doctest::Approx(sc.var_sigma).epsilon(0.08));
}

TEST_CASE("tilted route rejects joint statistics on non-thermal protocols") {
  SyntheticQutritParams s;
  const Protocol p = synthetic_qutrit_protocol(s);
  CHECK_THROWS_AS((void)cumulants_from_mgf(p), ConfigError);
}
