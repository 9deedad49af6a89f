// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs the three routes (trajectory Monte Carlo, exact tilted
// propagator, slow-driving kernels) against each other and against the
// closed-form parametric-oscillator results at desk scale.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "qjs/ion.hpp"
#include "qjs/lindblad.hpp"
#include "qjs/operator_core.hpp"
#include "qjs/protocol.hpp"
#include "qjs/quadrature.hpp"
#include "qjs/rng.hpp"
#include "qjs/slow_driving.hpp"
#include "qjs/tilted.hpp"
#include "qjs/trajectory.hpp"
#include "support/oracles.hpp"

namespace {

using namespace qjs;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

template <class F>
void run(int id, const char* title, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, fmt("exception: %s", e.what())};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("[%s] criterion %2d: %-28s | %s (%.1fs)\n",
              o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

double rel(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

Mat random_mat(int d, Xoshiro256pp& rng) {
  auto normal = [&rng] {
    const double u1 = rng.uniform(), u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * M_PI * u2);
  };
  Mat x(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) x(r, c) = cplx(normal(), normal());
  x /= x.cwiseAbs().maxCoeff();
  return x;
}

}  // namespace

int main() {
  std::printf("acceptance: joint (sigma, wtilde) statistics — "
              "trajectory / tilted-propagator / slow-driving cross checks\n");
  std::fflush(stdout);

  // Shared slow qubit drive for criteria 1-2 (coherent: [dH, H] != 0).
  QubitDriveParams qd;
  qd.theta_max = 0.5;
  const Protocol pq = qubit_protocol(qd);
  Ensemble fwd, rev;

  // ---- 1: IFT on trajectories + exact G(1,0) = 1 --------------------------
  run(1, "integral FT (MC + exact)", [&]() -> Outcome {
    SamplerOptions so;
    so.n_traj = 200000;
    so.dt = 0.01;
    so.seed = 11;
    const auto tmc0 = std::chrono::steady_clock::now();
    fwd = sample_ensemble(pq, so);
    const double mc_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tmc0)
            .count();
    const EnsembleStats st = ensemble_stats(fwd, 50);
    const double gap = std::abs(st.exp_minus_sigma.value - 1.0);
    const double lim = 3.0 * st.exp_minus_sigma.se;

    const auto tg0 = std::chrono::steady_clock::now();
    const MgfValue g10 = exact_mgf(pq, 1.0, 0.0);
    const double mgf_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tg0)
            .count();
    const double ift_exact = std::abs(g10.g - 1.0);

    const bool ok = gap <= lim && ift_exact <= 1e-8 && mc_secs < 120.0 &&
                    mgf_secs < 1.0;
    return {ok, fmt("|<e^-s>-1|=%.2e (3se=%.2e), |G(1,0)-1|=%.1e, "
                    "mc=%.0fs mgf=%.2fs",
                    gap, lim, ift_exact, mc_secs, mgf_secs)};
  });

  // ---- 2: joint detailed FT, forward vs reverse ----------------------------
  run(2, "joint detailed FT", [&]() -> Outcome {
    SamplerOptions so;
    so.n_traj = 200000;
    so.dt = 0.01;
    so.seed = 12;
    rev = sample_ensemble(reversed(pq), so);
    const DftReport r = dft_joint_check(fwd, rev);

    QubitDriveParams qf = qd;
    qf.tau = 1.0;  // fast drive: reported, never gated
    const Protocol pf = qubit_protocol(qf);
    SamplerOptions sf = so;
    sf.n_traj = 50000;
    sf.seed = 13;
    const Ensemble ff = sample_ensemble(pf, sf);
    sf.seed = 14;
    const Ensemble fr = sample_ensemble(reversed(pf), sf);
    const DftReport rf = dft_joint_check(ff, fr);

    const bool ok = r.pass && r.n_checked >= 5;
    return {ok, fmt("slow %d/%d bins max|z|=%.2f; fast drive (tau=1) "
                    "reported: %d/%d bins max|z|=%.2f",
                    r.n_pass, r.n_checked, r.max_abs_z, rf.n_pass,
                    rf.n_checked, rf.max_abs_z)};
  });

  // ---- 3: finite-time FT symmetry of the CGF --------------------------------
  run(3, "CGF symmetry K(u,v)=K(1-u,-v)", [&]() -> Outcome {
    QubitDriveParams q3;
    q3.theta_max = 0.4;
    const Protocol p50 = qubit_protocol(q3);
    const double bbar =
        integrate_gl([&](double t) { return p50.beta(t); }, 0.0, p50.tau, 64) /
        p50.tau;
    const double u = 0.3, v = 0.2 * bbar;

    const double ks = cgf_joint_slow(p50, u, v);
    const double ksm = cgf_joint_slow(p50, 1.0 - u, -v);
    const double slow_res = std::abs(ks - ksm);

    TiltOptions to;
    to.rel_tol = 1e-10;
    const double r50 = cgf_symmetry_residual(p50, u, v, to);
    QubitDriveParams q100 = q3;
    q100.tau = 100.0;
    const double r100 = cgf_symmetry_residual(qubit_protocol(q100), u, v, to);

    const bool ok = slow_res <= 1e-10 && r100 > 0.0 && r50 / r100 >= 1.8;
    return {ok, fmt("slow residual=%.1e; exact residual %.2e (tau=50) -> "
                    "%.2e (tau=100), ratio=%.2f",
                    slow_res, r50, r100, r50 / r100)};
  });

  // ---- 4: oscillator three-route agreement ----------------------------------
  run(4, "oscillator: MC/exact/slow", [&]() -> Outcome {
    IonParams ip;  // omega0 = Gamma = Tc = 1, Th = 2, tau = 100, n_max = 40
    ip.tail_tol = 1e-4;
    const Protocol ion = ion_protocol(ip);

    const CumulantReport slow = cumulants_slow(ion);
    // The gates below sit at the percent scale; a 1e-7 product-integral
    // tolerance leaves the stencil-amplified error near 1e-4, two orders
    // below them, and the cross cumulant is not part of this criterion.
    TiltOptions to;
    to.rel_tol = 1e-7;
    to.init_steps = 128;
    const ExactCumulants ex = cumulants_from_mgf(ion, 0.05, -1.0, to, false);

    SamplerOptions so;
    so.n_traj = 1200;
    so.dt = 1.0e-3;
    so.seed = 21;
    const Ensemble ens = sample_ensemble(ion, so);
    const EnsembleStats st = ensemble_stats(ens, 40);

    auto within = [](const MeanSE& m, double x) {
      return std::abs(m.value - x) <= 3.0 * m.se;
    };
    const bool mc_ok = within(st.mean_sigma, ex.mean_sigma) &&
                       within(st.var_sigma, ex.var_sigma) &&
                       within(st.mean_wtilde, ex.mean_wtilde) &&
                       within(st.var_w, ex.var_w);
    const double slow_excess = slow.mean_w - slow.adiabatic_work;
    const double dev100 = std::max(
        std::max(rel(ex.mean_sigma, slow.mean_sigma),
                 rel(ex.var_sigma, slow.var_sigma)),
        std::max(rel(ex.mean_wtilde, slow_excess), rel(ex.var_w, slow.var_w)));

    IonParams ip50 = ip;
    ip50.tau = 50.0;
    const Protocol ion50 = ion_protocol(ip50);
    const CumulantReport s50 = cumulants_slow(ion50);
    const ExactCumulants e50 = cumulants_from_mgf(ion50, 0.05, -1.0, to, false);
    const double dev50 = std::max(
        std::max(rel(e50.mean_sigma, s50.mean_sigma),
                 rel(e50.var_sigma, s50.var_sigma)),
        std::max(rel(e50.mean_wtilde, s50.mean_w - s50.adiabatic_work),
                 rel(e50.var_w, s50.var_w)));

    const bool ok = mc_ok && dev100 <= 0.05 && dev50 > dev100;
    return {ok, fmt("MC-exact within 3se: %s; exact-slow rel dev %.2e "
                    "(tau=100) vs %.2e (tau=50)",
                    mc_ok ? "yes" : "NO", dev100, dev50)};
  });

  // ---- 5: slow route vs closed forms, converging in n_max -------------------
  run(5, "oscillator closed forms", [&]() -> Outcome {
    IonParams c5;
    c5.omega0 = 3.0;
    const IonClosedForm cf = ion_closed_form(c5);
    auto max_dev = [&](int n_max, double tail_tol) {
      IonParams pp = c5;
      pp.n_max = n_max;
      pp.tail_tol = tail_tol;
      const CumulantReport s = cumulants_slow(ion_protocol(pp));
      double d = rel(s.adiabatic_work, cf.adiabatic_work);
      d = std::max(d, rel(s.mean_w - s.adiabatic_work, cf.mean_w_excess));
      d = std::max(d, rel(s.var_w, cf.var_w));
      d = std::max(d, rel(s.mean_sigma, cf.mean_sigma));
      d = std::max(d, rel(s.var_sigma, cf.var_sigma));
      d = std::max(d, rel(2.0 * s.dI_sigma, cf.two_dI_sigma));
      d = std::max(d, rel(s.dI_w, cf.dI_w));
      return d;
    };
    const double d40 = max_dev(40, 1e-8);
    const double d25 = max_dev(25, 1e-6);
    const double d15 = max_dev(15, 1e-3);
    const bool ok = d40 <= 1e-3 && d15 > d25 && d25 >= d40;
    return {ok, fmt("max rel dev over 7 quantities: n_max=40 %.2e "
                    "(tol 1e-3), 25 %.2e, 15 %.2e",
                    d40, d25, d15)};
  });

  // ---- 6: parameter sweep: TUR floor, FDR gap, gap = 2 dI ------------------
  run(6, "TUR/FDR sweep (25x25)", [&]() -> Outcome {
    const auto t0 = std::chrono::steady_clock::now();
    const IonParams base;
    const auto rows = fig1_sweep(base, 25, 25);
    double min_tur = 1e300, min_gap = 1e300, max_eq = 0.0;
    for (const auto& r : rows) {
      min_tur = std::min(min_tur, r.tur_ratio);
      min_gap = std::min(min_gap, r.fdr_gap);
      IonParams pp = base;
      pp.Gamma = 1.0 / r.t_eq;
      pp.Tc = r.Tc;
      pp.Th = 2.0 * r.Tc;
      const IonClosedForm c = ion_closed_form(pp);
      max_eq = std::max(max_eq, rel(c.fdr_gap, c.two_dI_sigma));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool ok = rows.size() == 625 && min_tur >= 2.0 - 1e-9 &&
                    min_gap >= -1e-12 && max_eq <= 1e-8 && secs < 10.0;
    return {ok, fmt("min tur=%.4f (>=2), min fdr gap=%.2e (>=0), "
                    "max |gap-2dI| rel=%.1e, %.1fs",
                    min_tur, min_gap, max_eq, secs)};
  });

  // ---- 7: Drazin pseudoinverse axioms ---------------------------------------
  run(7, "Drazin axioms", [&]() -> Outcome {
    Xoshiro256pp rng(2026, 0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const int d = 2 + k % 3;
      RVec pop;
      const ModelSpec m = qjs::testing::random_db_model(d, rng, &pop);
      const SteadyState ss = steady_state(m);
      for (int repeat = 0; repeat < 2; ++repeat) {
        const Mat x = random_mat(d, rng);
        const Mat y = drazin_apply(m, ss, x);
        const Mat proj = x - x.trace() * ss.pi;
        const Mat a1 = drazin_apply(m, ss, apply_generator(m, x)) - proj;
        const Mat a2 = apply_generator(m, y) - proj;
        worst = std::max(worst, a1.cwiseAbs().maxCoeff());
        worst = std::max(worst, a2.cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(y.trace()));
      }
    }
    // oscillator twin: sector-restricted solve at a generic instant
    IonParams ip;
    ip.tail_tol = 1e-4;
    const Protocol ion = ion_protocol(ip);
    const double t = 0.37 * ip.tau;
    const ModelSpec m = ion.model(t);
    const SteadyState ss = ion.steady(t);
    RestrictedSolver rs(m, ss, RestrictedSolver::Side::Schrodinger);
    const bool sectored = rs.sectored();
    Xoshiro256pp rng2(7, 3);
    const Mat x = random_mat(m.dim(), rng2);
    const Mat y = drazin_apply(m, ss, x);
    const Mat proj = x - x.trace() * ss.pi;
    double iworst = (apply_generator(m, y) - proj).cwiseAbs().maxCoeff();
    iworst = std::max(iworst, std::abs(y.trace()));
    iworst = std::max(
        iworst,
        (drazin_apply(m, ss, apply_generator(m, x)) - proj).cwiseAbs().maxCoeff());
    const bool ok = worst <= 1e-8 && iworst <= 1e-8 && sectored;
    return {ok, fmt("10 random DB models worst=%.1e; oscillator twin "
                    "worst=%.1e (sectored=%s)",
                    worst, iworst, sectored ? "yes" : "no")};
  });

  // ---- 8: exhaustive path enumeration (commuting family) --------------------
  run(8, "path enumeration sums", [&]() -> Outcome {
    QubitDriveParams q8;
    q8.theta_max = 0.0;
    q8.tau = 6e-4;
    const Protocol p8 = qubit_protocol(q8);
    double worst = 0.0;
    long paths = 0;
    for (const int n : {4, 6}) {
      const auto r = qjs::testing::enumerate_paths(p8, n);
      worst = std::max({worst, std::abs(r.sum_p - 1.0),
                        std::abs(r.sum_p_rev - 1.0), std::abs(r.ift - 1.0)});
      paths += r.n_paths;
    }
    return {worst <= 1e-6,
            fmt("max |sum-1| over {P, P~, <e^-s>} = %.2e (%ld paths)", worst,
                paths)};
  });

  // ---- 9: coherent-drive FDR correction -------------------------------------
  run(9, "FDR skew correction", [&]() -> Outcome {
    QubitDriveParams qc;
    qc.theta_max = 0.7;
    const CumulantReport c = cumulants_slow(qubit_protocol(qc));
    const double res =
        std::abs(c.var_sigma - 2.0 * (c.mean_sigma + c.dI_sigma));
    QubitDriveParams q0;
    q0.theta_max = 0.0;
    const CumulantReport c0 = cumulants_slow(qubit_protocol(q0));
    const bool ok =
        c.dI_sigma > 0.0 && res <= 1e-8 && std::abs(c0.dI_sigma) <= 1e-10;
    return {ok, fmt("coherent dI=%.3e>0, |var-2(mean+dI)|=%.1e; commuting "
                    "dI=%.1e",
                    c.dI_sigma, res, c0.dI_sigma)};
  });

  // ---- 10: modular jump structure + counterexample ---------------------------
  run(10, "privileged-jump detection", [&]() -> Outcome {
    IonParams ip;
    ip.tail_tol = 1e-4;
    const Protocol ion = ion_protocol(ip);
    const double t = 0.37 * ip.tau;
    const ModelSpec m = ion.model(t);
    const PrivilegedStructure st = check_structure(m, ion.steady(t));
    const IonCurves cv = ion_curves(ip);
    const double bw = cv.beta(t) * cv.omega(t);
    const double d_lower = std::abs(st.dphi[0] + bw);   // jump "a"
    const double d_raise = std::abs(st.dphi[1] - bw);   // jump "adag"
    const bool ion_ok = st.privileged && st.detailed_balance &&
                        d_lower <= 1e-8 && d_raise <= 1e-8;

    // counterexample: thermal qubit plus a sigma_x jump is not privileged
    Mat sm(2, 2), sx(2, 2), h(2, 2);
    sm << 0, 0, 1, 0;  // basis (e, g): |g><e|
    sx << 0, 1, 1, 0;
    h << 0.65, 0, 0, -0.65;
    const double nb = 1.0 / std::expm1(1.3);
    ModelSpec bad;
    bad.H = h;
    bad.jumps.push_back({"down", std::sqrt(nb + 1.0) * sm});
    bad.jumps.push_back({"up", std::sqrt(nb) * Mat(sm.adjoint())});
    bad.jumps.push_back({"sx", 0.4 * sx});
    const PrivilegedStructure bst = check_structure(bad, steady_state(bad));
    bool sampler_refused = false;
    Protocol pb;
    pb.tau = 1.0;
    pb.thermal = false;
    pb.model = [bad](double) { return bad; };
    try {
      SamplerOptions so;
      so.n_traj = 2;
      so.dt = 0.005;
      (void)sample_ensemble(pb, so);
    } catch (const NotPrivilegedError&) {
      sampler_refused = true;
    }
    const bool ok = ion_ok && !bst.privileged && sampler_refused;
    return {ok, fmt("ladder dphi=-+bw to %.1e/%.1e; sigma_x model rejected=%s",
                    d_lower, d_raise,
                    (!bst.privileged && sampler_refused) ? "yes" : "NO")};
  });

  std::printf("%s: %d/10 criteria passed\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
