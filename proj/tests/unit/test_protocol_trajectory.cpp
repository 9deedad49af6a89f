// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "qjs/quadrature.hpp"
#include "qjs/trajectory.hpp"
#include "support/oracles.hpp"

using namespace qjs;

TEST_CASE("qubit protocol: partition function, adiabatic work, reversal") {
  QubitDriveParams q;
  q.theta_max = 0.4;
  const Protocol p = qubit_protocol(q);

  // closed forms for the two-level Gibbs family
  const auto omega_of = [&](double t) {
    const ModelSpec m = p.model(t);
    return 2.0 * m.H.eigenvalues().real().maxCoeff();
  };
  const double t0 = 0.41 * p.tau;
  CHECK(p.ln_Z(t0) ==
        doctest::Approx(std::log(2.0 * std::cosh(0.5 * p.beta(t0) * omega_of(t0))))
            .epsilon(1e-10));

  // cyclic in both beta and omega: equilibrium free energy difference vanishes
  CHECK(delta_F(p) == doctest::Approx(0.0).epsilon(1e-12));

  // W = -int dt (omega_dot/2) tanh(beta omega / 2) for this family
  const double w_closed = integrate_adaptive(
      [&](double t) {
        const double h = 1e-6;
        const double dw = (omega_of(t + h) - omega_of(t - h)) / (2 * h);
        return -0.5 * dw * std::tanh(0.5 * p.beta(t) * omega_of(t));
      },
      1e-5, p.tau - 1e-5, 1e-10);
  CHECK(adiabatic_work(p) == doctest::Approx(w_closed).epsilon(1e-5));

  const Protocol r = reversed(p);
  const double ts = 0.3 * p.tau;
  CHECK((r.model(ts).H - p.model(p.tau - ts).H).norm() < 1e-12);
  CHECK((r.dH(ts) + p.dH(p.tau - ts)).norm() < 1e-12);
  CHECK(r.beta(ts) == doctest::Approx(p.beta(p.tau - ts)).epsilon(1e-12));
  CHECK(r.dbeta(ts) == doctest::Approx(-p.dbeta(p.tau - ts)).epsilon(1e-12));
}

TEST_CASE("banded operator compilation round-trips") {
  Xoshiro256pp rng(4, 4);
  Mat a = Mat::Zero(6, 6);
  for (int k : {-2, 0, 1}) {
    for (int j = 0; j < 6 - std::abs(k); ++j) {
      const int row = k >= 0 ? j : j - k, col = k >= 0 ? j + k : j;
      a(row, col) = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    }
  }
  const DiagOp op = DiagOp::compile(a);
  CHECK(op.offsets.size() == 3);
  CHECK((op.dense() - a).norm() < 1e-14);
  Vec v(6), out;
  for (int i = 0; i < 6; ++i) v[i] = cplx(rng.uniform(), rng.uniform());
  op.apply(v, out);
  CHECK((out - a * v).norm() < 1e-13);
}

TEST_CASE("jackknife of the mean reproduces the classical standard error") {
  // with one element per block, the delete-one jackknife SE of the mean is
  // exactly s/sqrt(n)
  std::vector<double> x(100);
  double s = 0, s2 = 0;
  for (int i = 0; i < 100; ++i) {
    x[i] = std::sin(3.7 * i) + 0.01 * i;
    s += x[i];
    s2 += x[i] * x[i];
  }
  const double mean = s / 100, var = (s2 - s * s / 100) / 99;
  const MeanSE j = jackknife_mean(x, 100);
  CHECK(j.value == doctest::Approx(mean).epsilon(1e-12));
  CHECK(j.se == doctest::Approx(std::sqrt(var / 100)).epsilon(1e-9));
}

TEST_CASE("frozen privileged protocol: sigma and w vanish pathwise") {
  QubitDriveParams q;
  q.amp1 = q.amp2 = 0.0;   // omega constant
  q.beta_h = q.beta_c;     // beta constant
  q.theta_max = 0.0;
  q.tau = 4.0;
  const Protocol p = qubit_protocol(q);

  SamplerOptions o;
  o.n_traj = 400;
  o.dt = 0.02;
  o.seed = 777;
  const Ensemble e = sample_ensemble(p, o);
  REQUIRE(e.samples.size() == 400);
  double max_s = 0, max_w = 0;
  long jumps = 0;
  for (const auto& smp : e.samples) {
    max_s = std::max(max_s, std::abs(smp.sigma));
    max_w = std::max(max_w, std::abs(smp.w));
    jumps += smp.jumps;
  }
  CHECK(max_s < 1e-9);
  CHECK(max_w < 1e-9);
  CHECK(jumps > 0);  // the paths do jump; the ledger still cancels exactly

  const EnsembleStats st = ensemble_stats(e);
  CHECK(st.exp_minus_sigma.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("driven qubit: sampled IFT holds within errors") {
  QubitDriveParams q;
  q.tau = 5.0;
  q.theta_max = 0.5;
  const Protocol p = qubit_protocol(q);
  SamplerOptions o;
  o.n_traj = 3000;
  o.dt = 0.01;
  o.seed = 1234;
  const Ensemble e = sample_ensemble(p, o);
  const EnsembleStats st = ensemble_stats(e);
  CHECK(std::abs(st.exp_minus_sigma.value - 1.0) <= 4.0 * st.exp_minus_sigma.se);
  CHECK(st.mean_sigma.value > 0.0);  // fast drive dissipates
  CHECK(e.max_step_rate <= 0.05);
}

TEST_CASE("sampler gates and structure guards") {
  QubitDriveParams q;
  const Protocol p = qubit_protocol(q);
  SamplerOptions o;
  o.n_traj = 10;
  o.dt = 0.5;  // violates the jump-rate cap
  CHECK_THROWS_AS((void)sample_ensemble(p, o), ConfigError);

  // non-privileged model: per-jump potential fit must fail
  Mat sx(2, 2), h(2, 2);
  sx << 0, 1, 1, 0;
  h << 0.55, 0, 0, -0.55;
  ModelSpec bad;
  bad.H = h;
  bad.jumps.push_back({"down", 0.8 * Mat(sx.triangularView<Eigen::StrictlyLower>())});
  bad.jumps.push_back({"sx", 0.5 * sx});
  Protocol pb;
  pb.tau = 1.0;
  pb.thermal = false;
  pb.model = [bad](double) { return bad; };
  SamplerOptions ob;
  ob.n_traj = 4;
  ob.dt = 0.01;
  CHECK_THROWS_AS((void)sample_ensemble(pb, ob), NotPrivilegedError);
}

TEST_CASE("brute-force path enumeration at tiny step count") {
  QubitDriveParams q;
  q.theta_max = 0.0;  // commuting family: discretization defects stay O(N dt^2)
  q.tau = 6e-4;       // whole drive inside six enumeration steps
  const Protocol p = qubit_protocol(q);
  for (int n : {3, 6}) {
    const testing::EnumReport r = testing::enumerate_paths(p, n);
    CHECK(std::abs(r.sum_p - 1.0) < 1e-6);
    CHECK(std::abs(r.sum_p_rev - 1.0) < 1e-6);
    CHECK(std::abs(r.ift - 1.0) < 1e-6);
  }
}
