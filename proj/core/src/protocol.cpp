// SPDX-License-Identifier: Apache-2.0
#include "qjs/protocol.hpp"

#include <cmath>

#include "qjs/quadrature.hpp"

namespace qjs {

SteadyState Protocol::steady(double t) const {
  const ModelSpec m = model(t);
  if (thermal) return thermal_state(m, beta(t), steady_residual_tol);
  if (pi_fn) {
    SteadyState ss;
    ss.pi = pi_fn(t);
    ss.spec = SpectralDecomp::hermitian(ss.pi);
    if (ss.spec.min_eval() <= 0.0)
      throw NonFaithfulError("prescribed stationary state is not faithful");
    ss.residual = apply_generator(m, ss.pi).norm();
    if (ss.residual > steady_residual_tol)
      throw NumericError("prescribed stationary state fails the residual check");
    return ss;
  }
  return steady_state(m);
}

Mat Protocol::propagation_hamiltonian(double t, const ModelSpec& m) const {
  if (!gauge) return m.H;
  return m.H + gauge(t);
}

double Protocol::ln_Z(double t) const {
  if (!thermal) throw ConfigError("ln_Z requires a thermal protocol");
  return log_partition(model(t).H, beta(t));
}

double adiabatic_work(const Protocol& p, double tol, double* err_out) {
  auto f = [&p](double t) {
    const SteadyState ss = p.steady(t);
    return (p.dH(t) * ss.pi).trace().real();
  };
  return integrate_adaptive(f, 0.0, p.tau, tol, err_out);
}

double delta_F(const Protocol& p) {
  if (!p.thermal) throw ConfigError("delta_F requires a thermal protocol");
  return p.ln_Z(0.0) / p.beta(0.0) - p.ln_Z(p.tau) / p.beta(p.tau);
}

Protocol reversed(const Protocol& p) {
  Protocol r = p;
  r.name = p.name.empty() ? "reversed" : p.name + "-reversed";
  const double tau = p.tau;
  r.model = [p, tau](double t) { return p.model(tau - t); };
  r.dH = [p, tau](double t) { return Mat(-p.dH(tau - t)); };
  if (p.gauge) r.gauge = [p, tau](double t) { return Mat(-p.gauge(tau - t)); };
  if (p.beta) r.beta = [p, tau](double t) { return p.beta(tau - t); };
  if (p.dbeta) r.dbeta = [p, tau](double t) { return -p.dbeta(tau - t); };
  if (p.pi_fn) r.pi_fn = [p, tau](double t) { return p.pi_fn(tau - t); };
  if (p.phidot_fn) r.phidot_fn = [p, tau](double t) { return Mat(-p.phidot_fn(tau - t)); };
  return r;
}

// ---- built-in qubit family ----------------------------------------------------

namespace {

constexpr double kPi = 3.14159265358979323846;

struct QubitCurves {
  double omega, domega, beta, dbeta, theta, dtheta;
};

QubitCurves qubit_curves(const QubitDriveParams& q, double t) {
  const double x = t / q.tau;
  QubitCurves c;
  c.omega = q.omega0 * (1.0 + q.amp1 * std::sin(2 * kPi * x) + q.amp2 * std::sin(4 * kPi * x + kPi));
  c.domega = q.omega0 * (2 * kPi / q.tau) *
             (q.amp1 * std::cos(2 * kPi * x) + 2 * q.amp2 * std::cos(4 * kPi * x + kPi));
  const double s = std::sin(kPi * x);
  c.beta = q.beta_c + (q.beta_h - q.beta_c) * s * s;
  c.dbeta = (q.beta_h - q.beta_c) * (kPi / q.tau) * std::sin(2 * kPi * x);
  c.theta = q.theta_max * s * s;
  c.dtheta = q.theta_max * (kPi / q.tau) * std::sin(2 * kPi * x);
  return c;
}

}  // namespace

Protocol qubit_protocol(const QubitDriveParams& q) {
  if (q.omega0 * (1.0 - q.amp1 - q.amp2) <= 0.0)
    throw ConfigError("qubit drive amplitudes allow omega <= 0");

  Mat sz(2, 2), sx(2, 2), sm(2, 2), sp(2, 2);
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  sm << 0, 0, 1, 0;  // |-><+| in the eigenbasis ordering (+ is column 0)
  sp << 0, 1, 0, 0;

  Protocol p;
  p.tau = q.tau;
  p.thermal = true;
  p.name = q.theta_max == 0.0 ? "qubit" : "qubit-coherent";
  p.beta = [q](double t) { return qubit_curves(q, t).beta; };
  p.dbeta = [q](double t) { return qubit_curves(q, t).dbeta; };
  p.model = [q, sz, sx, sm, sp](double t) {
    const QubitCurves c = qubit_curves(q, t);
    Mat rot(2, 2);  // exp(-i theta sy / 2)
    const double h = c.theta / 2;
    rot << std::cos(h), -std::sin(h), std::sin(h), std::cos(h);
    ModelSpec m;
    m.H = 0.5 * c.omega * (std::cos(c.theta) * sz + std::sin(c.theta) * sx);
    const double N = 1.0 / std::expm1(c.beta * c.omega);
    const double gdn = std::sqrt(q.Gamma * (N + 1.0));
    const double gup = std::sqrt(q.Gamma * N);
    m.jumps.push_back({"down", gdn * (rot * sm * rot.adjoint())});
    m.jumps.push_back({"up", gup * (rot * sp * rot.adjoint())});
    return m;
  };
  p.dH = [q, sz, sx](double t) {
    const QubitCurves c = qubit_curves(q, t);
    const Mat dir = std::cos(c.theta) * sz + std::sin(c.theta) * sx;
    const Mat perp = -std::sin(c.theta) * sz + std::cos(c.theta) * sx;
    return Mat(0.5 * c.domega * dir + 0.5 * c.omega * c.dtheta * perp);
  };
  return p;
}

// ---- synthetic rotating qutrit -------------------------------------------------

namespace {

struct QutritCurves {
  Eigen::Vector3d p, dp;
  double theta, dtheta;
};

QutritCurves qutrit_curves(const SyntheticQutritParams& q, double t) {
  const double x = t / q.tau;
  const double s2 = std::sin(kPi * x) * std::sin(kPi * x);
  const double ds2 = (kPi / q.tau) * std::sin(2 * kPi * x);
  const Eigen::Vector3d g(0.0, 1.0 + 0.3 * s2, 1.8 - 0.4 * s2);
  const Eigen::Vector3d dg(0.0, 0.3 * ds2, -0.4 * ds2);
  Eigen::Vector3d w, dw;
  for (int i = 0; i < 3; ++i) {
    w[i] = std::exp(-g[i]);
    dw[i] = -dg[i] * w[i];
  }
  const double Q = w.sum(), dQ = dw.sum();
  QutritCurves c;
  c.p = w / Q;
  c.dp = (dw - c.p * dQ) / Q;
  c.theta = q.theta_max * s2;
  c.dtheta = q.theta_max * ds2;
  return c;
}

}  // namespace

Protocol synthetic_qutrit_protocol(const SyntheticQutritParams& q) {
  Mat J = Mat::Zero(3, 3);  // fixed rotation generator coupling (0,1) and (1,2)
  J(0, 1) = -kI;
  J(1, 0) = kI;
  J(1, 2) = -0.7 * kI;
  J(2, 1) = 0.7 * kI;
  const Eigen::Vector3d E(0.0, 1.1, 2.3);
  const Eigen::Vector3d kappa(0.8, 1.1, 0.6);  // base pair rates (01, 12, 02)
  const int pair_a[3] = {0, 1, 0};
  const int pair_b[3] = {1, 2, 2};

  Protocol p;
  p.tau = q.tau;
  p.thermal = false;
  p.name = q.cycle_current == 0.0 ? "qutrit" : "qutrit-cycle";

  auto frame = [J](double theta) { return expm(Mat(-kI * theta * J)); };

  p.model = [q, J, E, kappa, pair_a, pair_b, frame](double t) {
    const QutritCurves c = qutrit_curves(q, t);
    const Mat U = frame(c.theta);
    ModelSpec m;
    m.H = U * E.asDiagonal().toDenseMatrix().cast<cplx>() * U.adjoint();
    for (int k = 0; k < 3; ++k) {
      const int a = pair_a[k], b = pair_b[k];
      // pairwise-balanced rates: k_{a<-b} p_b = k_{b<-a} p_a
      const double down = q.base_rate * kappa[k] * std::sqrt(c.p[a] / c.p[b]);
      const double up = q.base_rate * kappa[k] * std::sqrt(c.p[b] / c.p[a]);
      Mat lab = Mat::Zero(3, 3), lba = Mat::Zero(3, 3);
      lab(a, b) = std::sqrt(down);
      lba(b, a) = std::sqrt(up);
      m.jumps.push_back({"d" + std::to_string(b) + std::to_string(a), U * lab * U.adjoint()});
      m.jumps.push_back({"u" + std::to_string(a) + std::to_string(b), U * lba * U.adjoint()});
    }
    if (q.cycle_current > 0.0) {
      // uniform probability current around 0 -> 1 -> 2 -> 0: stationary for
      // p but violates detailed balance
      for (int k = 0; k < 3; ++k) {
        const int a = k, b = (k + 1) % 3;
        Mat l = Mat::Zero(3, 3);
        l(b, a) = std::sqrt(q.cycle_current / c.p[a]);
        m.jumps.push_back({"c" + std::to_string(a) + std::to_string(b), U * l * U.adjoint()});
      }
    }
    return m;
  };
  p.dH = [q, J, E, frame](double t) {
    const QutritCurves c = qutrit_curves(q, t);
    const Mat U = frame(c.theta);
    const Mat H = U * E.asDiagonal().toDenseMatrix().cast<cplx>() * U.adjoint();
    return Mat(-kI * c.dtheta * comm(J, H));
  };
  p.pi_fn = [q, frame](double t) {
    const QutritCurves c = qutrit_curves(q, t);
    const Mat U = frame(c.theta);
    return Mat(U * c.p.asDiagonal().toDenseMatrix().cast<cplx>() * U.adjoint());
  };
  p.phidot_fn = [q, J, frame](double t) {
    const QutritCurves c = qutrit_curves(q, t);
    const Mat U = frame(c.theta);
    Eigen::Vector3d phidot, phi;
    for (int i = 0; i < 3; ++i) {
      phi[i] = -std::log(c.p[i]);
      phidot[i] = -c.dp[i] / c.p[i];
    }
    const Mat Phi = U * phi.asDiagonal().toDenseMatrix().cast<cplx>() * U.adjoint();
    const Mat core = U * phidot.asDiagonal().toDenseMatrix().cast<cplx>() * U.adjoint();
    return Mat(core - kI * c.dtheta * comm(Mat(J), Phi));
  };
  return p;
}

}  // namespace qjs
