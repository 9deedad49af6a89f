// SPDX-License-Identifier: Apache-2.0
#include "qjs/trajectory.hpp"

#include "qjs/operator_core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qjs {

// ---- banded operators ---------------------------------------------------------

DiagOp DiagOp::compile(const Mat& a, double drop_tol) {
  const int d = static_cast<int>(a.rows());
  DiagOp op;
  op.dim = d;
  const double scale = a.cwiseAbs().maxCoeff();
  for (int k = -(d - 1); k <= d - 1; ++k) {
    const int j0 = std::max(0, -k);
    const int len = d - std::abs(k);
    double mx = 0.0;
    for (int j = j0; j < j0 + len; ++j) mx = std::max(mx, std::abs(a(j + k, j)));
    if (mx > drop_tol * scale && mx > 0.0) {
      Vec band(len);
      for (int j = j0; j < j0 + len; ++j) band[j - j0] = a(j + k, j);
      op.offsets.push_back(k);
      op.bands.push_back(std::move(band));
    }
  }
  return op;
}

void DiagOp::apply(const Vec& in, Vec& out) const {
  out.setZero(dim);
  for (size_t b = 0; b < offsets.size(); ++b) {
    const int k = offsets[b];
    const int j0 = std::max(0, -k);
    const Vec& band = bands[b];
    const int len = static_cast<int>(band.size());
    out.segment(j0 + k, len).noalias() +=
        band.cwiseProduct(in.segment(j0, len));
  }
}

Mat DiagOp::dense() const {
  Mat a = Mat::Zero(dim, dim);
  for (size_t b = 0; b < offsets.size(); ++b) {
    const int k = offsets[b];
    const int j0 = std::max(0, -k);
    for (int j = 0; j < static_cast<int>(bands[b].size()); ++j) a(j0 + j + k, j0 + j) = bands[b][j];
  }
  return a;
}

// ---- per-step operator tables --------------------------------------------------

namespace {

struct StepOps {
  DiagOp k0;
  std::vector<DiagOp> jumps;  // L_x sqrt(dt)
  std::vector<double> dphi, de;
  double mean_rate = 0.0;  // sum_x tr[L_x^+ L_x pi]
};

// spectral data of a Hermitian matrix with a cheap path for (numerically)
// diagonal input
struct CheapSpec {
  RVec val;
  Mat vec;
  bool diagonal = false;
};

CheapSpec cheap_spec(const Mat& h) {
  const int d = static_cast<int>(h.rows());
  double off = 0.0, scale = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double m = std::abs(h(i, j));
      scale = std::max(scale, m);
      if (i != j) off = std::max(off, m);
    }
  CheapSpec s;
  if (off <= 1e-13 * std::max(scale, 1e-300)) {
    s.val = h.diagonal().real();
    s.vec = Mat::Identity(d, d);
    s.diagonal = true;
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  s.val = es.eigenvalues();
  s.vec = es.eigenvectors();
  return s;
}

// dphi from pi L pi^{-1} = e^{-dphi} L; `logp` holds -ln p aligned with ps
double fit_dphi(const CheapSpec& ps, const RVec& logp, const Mat& l, double tol,
                const std::string& label, double t) {
  const Mat lb = ps.diagonal ? l : Mat(ps.vec.adjoint() * l * ps.vec);
  const ModularFit fit = modular_fit(RVec(-logp), lb);
  if (fit.residual > tol) {
    std::ostringstream os;
    os << "jump '" << label << "' is not a modular eigenoperator at t=" << t
       << " (residual " << fit.residual << ")";
    throw NotPrivilegedError(os.str());
  }
  return fit.dphi;
}

// fit dE from [H, L] = dE L given H's spectral data
double fit_de(const CheapSpec& hs, const Mat& l, double tol, const std::string& label,
              double t) {
  const Mat lb = hs.diagonal ? l : Mat(hs.vec.adjoint() * l * hs.vec);
  const int d = static_cast<int>(lb.rows());
  double num = 0.0, den = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double w = std::norm(lb(i, j));
      num += w * (hs.val[i] - hs.val[j]);
      den += w;
    }
  const double de = num / std::max(den, 1e-300);
  double resid2 = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      resid2 += std::norm((hs.val[i] - hs.val[j] - de) * lb(i, j));
  const double scale = std::max(1.0, hs.val.cwiseAbs().maxCoeff());
  if (std::sqrt(resid2 / std::max(den, 1e-300)) > tol * scale) {
    std::ostringstream os;
    os << "jump '" << label << "' is not an eigenoperator of [H, .] at t=" << t;
    throw NotPrivilegedError(os.str());
  }
  return de;
}

// stationary spectrum (log-weights) at time t without a full SteadyState
struct PiSpec {
  CheapSpec spec;   // of a Hermitian anchor (H for thermal, pi itself otherwise)
  RVec logp;        // -ln p_i aligned with spec columns
  RVec p;
};

PiSpec pi_spectrum(const Protocol& pr, const ModelSpec& m, double t) {
  PiSpec out;
  if (pr.thermal) {
    out.spec = cheap_spec(m.H);
    const double beta = pr.beta(t);
    RVec e = out.spec.val;
    const double e0 = e.minCoeff();
    RVec w(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) w[i] = std::exp(-beta * (e[i] - e0));
    const double z = w.sum();
    out.p = w / z;
  } else {
    const Mat pi = pr.pi_fn ? pr.pi_fn(t) : pr.steady(t).pi;
    out.spec = cheap_spec(pi);
    out.p = out.spec.val;
  }
  out.logp = RVec(out.p.size());
  for (Eigen::Index i = 0; i < out.p.size(); ++i) {
    if (out.p[i] <= 0.0) throw NonFaithfulError("stationary spectrum has a non-positive weight");
    out.logp[i] = -std::log(out.p[i]);
  }
  return out;
}

StepOps make_step_ops(const Protocol& pr, double t, double dt, double fit_tol) {
  const ModelSpec m = pr.model(t);
  StepOps ops;
  const int d = m.dim();
  const Mat hprop = pr.propagation_hamiltonian(t, m);
  Mat sum_ll = Mat::Zero(d, d);
  for (const auto& j : m.jumps) sum_ll += j.L.adjoint() * j.L;
  // Exact frozen-step no-jump kernel: keeps the survival probability
  // ||K0 psi||^2 correct to O(dt^3) per step, so slow long protocols do not
  // accumulate an O(dt) weak bias in the fluctuation-theorem estimators.
  const Mat k0 = expm(Mat(-(kI * hprop + 0.5 * sum_ll) * dt));
  ops.k0 = DiagOp::compile(k0);

  const PiSpec ps = pi_spectrum(pr, m, t);
  // mean rate in the basis of ps; pi = sum_i p_i |v_i><v_i|
  const Mat sll_b = ps.spec.diagonal ? sum_ll : Mat(ps.spec.vec.adjoint() * sum_ll * ps.spec.vec);
  for (int i = 0; i < d; ++i) ops.mean_rate += ps.p[i] * sll_b(i, i).real();

  const CheapSpec hs = pr.thermal ? ps.spec : cheap_spec(m.H);
  const double sdt = std::sqrt(dt);
  for (const auto& j : m.jumps) {
    ops.jumps.push_back(DiagOp::compile(Mat(sdt * j.L)));
    ops.dphi.push_back(fit_dphi(ps.spec, ps.logp, j.L, fit_tol, j.label, t));
    ops.de.push_back(pr.thermal ? fit_de(hs, j.L, fit_tol, j.label, t) : 0.0);
  }
  return ops;
}

// boundary measurement data: basis columns with per-column (phi, e)
struct Boundary {
  Mat basis;
  RVec phi, energy, prob;
};

Boundary boundary_data(const Protocol& pr, double t) {
  const ModelSpec m = pr.model(t);
  Boundary b;
  if (pr.thermal) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m.H);
    const RVec e = es.eigenvalues();
    b.basis = es.eigenvectors();
    b.energy = e;
    const double beta = pr.beta(t);
    const double lnz = log_partition(m.H, beta);
    b.phi = RVec(e.size());
    b.prob = RVec(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      b.phi[i] = beta * e[i] + lnz;
      b.prob[i] = std::exp(-b.phi[i]);
    }
  } else {
    const SteadyState ss = pr.steady(t);
    b.basis = ss.spec.evec;
    b.prob = ss.spec.eval;
    b.energy = RVec::Zero(b.prob.size());
    b.phi = RVec(b.prob.size());
    for (Eigen::Index i = 0; i < b.prob.size(); ++i) {
      if (b.prob[i] <= 0.0) throw NonFaithfulError("boundary state not faithful");
      b.phi[i] = -std::log(b.prob[i]);
    }
  }
  return b;
}

}  // namespace

Ensemble sample_ensemble(const Protocol& p, const SamplerOptions& opt) {
  if (!p.model) throw ConfigError("protocol has no model function");
  if (p.thermal && (!p.beta || !p.dH)) throw ConfigError("thermal protocol needs beta and dH");
  if (opt.n_traj <= 0 || opt.dt <= 0.0) throw ConfigError("n_traj and dt must be positive");

  const long n_steps = std::max(1L, std::lround(p.tau / opt.dt));
  const double dt = p.tau / static_cast<double>(n_steps);
  const double fit_tol = 1e-6;

  Ensemble ens;
  ens.thermal = p.thermal;
  ens.dt = dt;
  ens.n_steps = n_steps;
  if (p.thermal) {
    ens.adiabatic_work = adiabatic_work(p);
    ens.dF = delta_F(p);
  }

  const Boundary b0 = boundary_data(p, 0.0);
  const Boundary b1 = boundary_data(p, p.tau);
  const int d = static_cast<int>(b0.basis.rows());

  // per-trajectory persistent state
  struct TrajState {
    Vec psi;
    double sum_dphi = 0.0, sum_de = 0.0;
    double phi0 = 0.0, e0 = 0.0;
    std::uint32_t jumps = 0;
    Xoshiro256pp rng{0, 0};
  };
  std::vector<TrajState> st(static_cast<size_t>(opt.n_traj));
  for (long k = 0; k < opt.n_traj; ++k) {
    TrajState& s = st[k];
    s.rng = Xoshiro256pp(opt.seed, static_cast<std::uint64_t>(k));
    // initial projective measurement of the stationary ensemble
    double r = s.rng.uniform(), acc = 0.0;
    int mu = d - 1;
    for (int i = 0; i < d; ++i) {
      acc += b0.prob[i];
      if (r < acc) {
        mu = i;
        break;
      }
    }
    s.psi = b0.basis.col(mu);
    s.phi0 = b0.phi[mu];
    s.e0 = b0.energy[mu];
  }

  // advance everyone through shared step-operator blocks
  constexpr long kBlock = 512;
  Vec scratch(d), amp(d);
  std::vector<StepOps> block;
  std::vector<double> weights;
  for (long s0 = 0; s0 < n_steps; s0 += kBlock) {
    const long s1 = std::min(n_steps, s0 + kBlock);
    block.clear();
    block.reserve(static_cast<size_t>(s1 - s0));
    for (long n = s0; n < s1; ++n) {
      block.push_back(make_step_ops(p, (static_cast<double>(n) + 0.5) * dt, dt, fit_tol));
      const double step_rate = dt * block.back().mean_rate;
      ens.max_step_rate = std::max(ens.max_step_rate, step_rate);
      if (step_rate > opt.rate_cap) {
        std::ostringstream os;
        os << "dt * mean jump rate = " << step_rate << " exceeds rate_cap " << opt.rate_cap
           << "; need dt <= " << opt.rate_cap / block.back().mean_rate;
        throw ConfigError(os.str());
      }
    }
    for (long k = 0; k < opt.n_traj; ++k) {
      TrajState& s = st[k];
      for (const StepOps& ops : block) {
        ops.k0.apply(s.psi, scratch);
        const double q = scratch.squaredNorm();
        if (!(q > opt.norm_floor))
          throw NormCollapseError("state norm collapsed during a no-jump step");
        if (s.rng.uniform() < q) {
          s.psi = scratch / std::sqrt(q);
        } else {
          // jump: pick the channel proportional to dt ||L_x psi||^2
          weights.assign(ops.jumps.size(), 0.0);
          double tot = 0.0;
          for (size_t x = 0; x < ops.jumps.size(); ++x) {
            ops.jumps[x].apply(s.psi, amp);
            weights[x] = amp.squaredNorm();
            tot += weights[x];
          }
          if (tot <= 0.0) throw NormCollapseError("jump drawn with vanishing total weight");
          double r = s.rng.uniform() * tot, acc = 0.0;
          size_t pick = ops.jumps.size() - 1;
          for (size_t x = 0; x < ops.jumps.size(); ++x) {
            acc += weights[x];
            if (r < acc) {
              pick = x;
              break;
            }
          }
          ops.jumps[pick].apply(s.psi, amp);
          s.psi = amp / amp.norm();
          s.sum_dphi += ops.dphi[pick];
          s.sum_de += ops.de[pick];
          ++s.jumps;
        }
      }
      if (opt.progress_every > 0 && (k + 1) % opt.progress_every == 0 && s1 == n_steps)
        std::fprintf(stderr, "trajectory %ld/%ld\n", k + 1, opt.n_traj);
    }
  }

  // final projective measurement and bookkeeping
  ens.samples.resize(static_cast<size_t>(opt.n_traj));
  for (long k = 0; k < opt.n_traj; ++k) {
    TrajState& s = st[k];
    const Vec a = b1.basis.adjoint() * s.psi;
    double r = s.rng.uniform() * a.squaredNorm(), acc = 0.0;
    int nu = d - 1;
    for (int i = 0; i < d; ++i) {
      acc += std::norm(a[i]);
      if (r < acc) {
        nu = i;
        break;
      }
    }
    JointSample& js = ens.samples[static_cast<size_t>(k)];
    js.sigma = b1.phi[nu] - s.phi0 - s.sum_dphi;
    js.jumps = s.jumps;
    if (p.thermal) {
      js.w = b1.energy[nu] - s.e0 - s.sum_de;
      js.wtilde = js.w - ens.adiabatic_work;
    }
  }
  return ens;
}

// ---- jackknife estimators ------------------------------------------------------

namespace {

struct BlockSums {
  std::vector<double> s1, s2, s11;
  std::vector<long> n;
  double S1 = 0, S2 = 0, S11 = 0;
  long N = 0;
};

BlockSums block_sums(const std::vector<double>& x, const std::vector<double>* y, int blocks) {
  const long n = static_cast<long>(x.size());
  const int B = std::max(1, std::min<int>(blocks, static_cast<int>(n)));
  BlockSums bs;
  bs.s1.assign(B, 0.0);
  bs.s2.assign(B, 0.0);
  bs.s11.assign(B, 0.0);
  bs.n.assign(B, 0);
  for (long i = 0; i < n; ++i) {
    const int b = static_cast<int>((static_cast<long long>(i) * B) / n);
    const double yi = y ? (*y)[i] : x[i];
    bs.s1[b] += x[i];
    bs.s2[b] += x[i] * x[i];
    bs.s11[b] += x[i] * yi;
    bs.n[b] += 1;
  }
  for (int b = 0; b < B; ++b) {
    bs.S1 += bs.s1[b];
    bs.S2 += bs.s2[b];
    bs.S11 += bs.s11[b];
    bs.N += bs.n[b];
  }
  return bs;
}

MeanSE jackknife_generic(const BlockSums& bs,
                         const std::function<double(double, double, double, long)>& est) {
  const int B = static_cast<int>(bs.n.size());
  MeanSE out;
  out.value = est(bs.S1, bs.S2, bs.S11, bs.N);
  if (B < 2 || bs.N < 2) return out;
  std::vector<double> th(B);
  double mean = 0.0;
  for (int b = 0; b < B; ++b) {
    th[b] = est(bs.S1 - bs.s1[b], bs.S2 - bs.s2[b], bs.S11 - bs.s11[b], bs.N - bs.n[b]);
    mean += th[b];
  }
  mean /= B;
  double ss = 0.0;
  for (int b = 0; b < B; ++b) ss += (th[b] - mean) * (th[b] - mean);
  out.se = std::sqrt(ss * (B - 1) / static_cast<double>(B));
  return out;
}

}  // namespace

MeanSE jackknife_mean(const std::vector<double>& x, int blocks) {
  if (x.empty()) return {};
  return jackknife_generic(block_sums(x, nullptr, blocks),
                           [](double s1, double, double, long n) { return s1 / n; });
}

MeanSE jackknife_var(const std::vector<double>& x, int blocks) {
  if (x.size() < 2) return {};
  return jackknife_generic(block_sums(x, nullptr, blocks), [](double s1, double s2, double, long n) {
    return (s2 - s1 * s1 / n) / (n - 1);
  });
}

MeanSE jackknife_cov(const std::vector<double>& x, const std::vector<double>& y, int blocks) {
  if (x.size() != y.size()) throw ConfigError("jackknife_cov: size mismatch");
  if (x.size() < 2) return {};
  // S2 slot carries sum y via the trick below; build sums explicitly instead
  BlockSums bs = block_sums(x, &y, blocks);
  // need sum(y) per block too: recompute
  const long n = static_cast<long>(x.size());
  const int B = static_cast<int>(bs.n.size());
  std::vector<double> sy(B, 0.0);
  for (long i = 0; i < n; ++i) sy[static_cast<int>((static_cast<long long>(i) * B) / n)] += y[i];
  double Sy = 0.0;
  for (int b = 0; b < B; ++b) Sy += sy[b];

  auto est = [](double sx, double syv, double sxy, long nn) {
    return (sxy - sx * syv / nn) / (nn - 1);
  };
  MeanSE out;
  out.value = est(bs.S1, Sy, bs.S11, bs.N);
  if (B < 2) return out;
  std::vector<double> th(B);
  double mean = 0.0;
  for (int b = 0; b < B; ++b) {
    th[b] = est(bs.S1 - bs.s1[b], Sy - sy[b], bs.S11 - bs.s11[b], bs.N - bs.n[b]);
    mean += th[b];
  }
  mean /= B;
  double ss = 0.0;
  for (int b = 0; b < B; ++b) ss += (th[b] - mean) * (th[b] - mean);
  out.se = std::sqrt(ss * (B - 1) / static_cast<double>(B));
  return out;
}

EnsembleStats ensemble_stats(const Ensemble& e, int blocks) {
  EnsembleStats st;
  st.n_traj = static_cast<long>(e.samples.size());
  std::vector<double> sig, w, wt, es;
  sig.reserve(e.samples.size());
  w.reserve(e.samples.size());
  wt.reserve(e.samples.size());
  es.reserve(e.samples.size());
  double jumps = 0.0;
  for (const auto& s : e.samples) {
    sig.push_back(s.sigma);
    w.push_back(s.w);
    wt.push_back(s.wtilde);
    es.push_back(std::exp(-s.sigma));
    jumps += s.jumps;
  }
  st.mean_sigma = jackknife_mean(sig, blocks);
  st.var_sigma = jackknife_var(sig, blocks);
  st.exp_minus_sigma = jackknife_mean(es, blocks);
  st.mean_jumps = e.samples.empty() ? 0.0 : jumps / static_cast<double>(e.samples.size());
  if (e.thermal) {
    st.mean_w = jackknife_mean(w, blocks);
    st.var_w = jackknife_var(w, blocks);
    st.mean_wtilde = jackknife_mean(wt, blocks);
    st.cov_wtilde_sigma = jackknife_cov(wt, sig, blocks);
  }
  return st;
}

// ---- detailed fluctuation theorem checks ----------------------------------------

namespace {

struct Axis {
  double half = 0.0, width = 0.0;
  int nb = 0;
  int bin(double x) const {
    const int i = static_cast<int>(std::floor((x + half) / width));
    return (i < 0 || i >= nb) ? -1 : i;
  }
  double center(int i) const { return -half + (i + 0.5) * width; }
};

Axis make_axis(const std::vector<double>& v, int nb, double range_sigmas) {
  double m = 0.0, m2 = 0.0;
  for (double x : v) m += x;
  m /= std::max<size_t>(1, v.size());
  for (double x : v) m2 += (x - m) * (x - m);
  const double sd = std::sqrt(m2 / std::max<size_t>(1, v.size() - 1));
  Axis a;
  a.nb = nb;
  a.half = std::abs(m) + range_sigmas * std::max(sd, 1e-12);
  a.width = 2.0 * a.half / nb;
  return a;
}

}  // namespace

DftReport dft_joint_check(const Ensemble& fwd, const Ensemble& rev, const DftOptions& opt) {
  if (!fwd.thermal || !rev.thermal)
    throw ConfigError("joint DFT check requires thermal ensembles");
  std::vector<double> fs, fw;
  for (const auto& s : fwd.samples) fs.push_back(s.sigma), fw.push_back(s.wtilde);
  const Axis as = make_axis(fs, opt.bins, opt.range_sigmas);
  const Axis aw = make_axis(fw, opt.bins, opt.range_sigmas);

  const int nb = opt.bins;
  std::vector<long> cf(static_cast<size_t>(nb) * nb, 0), cr(static_cast<size_t>(nb) * nb, 0);
  for (const auto& s : fwd.samples) {
    const int i = aw.bin(s.wtilde), j = as.bin(s.sigma);
    if (i >= 0 && j >= 0) ++cf[static_cast<size_t>(i) * nb + j];
  }
  for (const auto& s : rev.samples) {
    const int i = aw.bin(s.wtilde), j = as.bin(s.sigma);
    if (i >= 0 && j >= 0) ++cr[static_cast<size_t>(i) * nb + j];
  }
  const double Nf = static_cast<double>(fwd.samples.size());
  const double Nr = static_cast<double>(rev.samples.size());

  DftReport rep;
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      const long nf = cf[static_cast<size_t>(i) * nb + j];
      const long nr = cr[static_cast<size_t>(nb - 1 - i) * nb + (nb - 1 - j)];
      if (nf < opt.min_count || nr < opt.min_count) continue;
      DftBin b;
      b.w_center = aw.center(i);
      b.s_center = as.center(j);
      b.n_fwd = nf;
      b.n_rev = nr;
      b.lhs = std::log((nf / Nf) / (nr / Nr));
      b.rhs = b.s_center;
      b.se = std::sqrt(1.0 / nf + 1.0 / nr);
      b.z = (b.lhs - b.rhs) / b.se;
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(b.z));
      rep.n_checked += 1;
      rep.n_pass += std::abs(b.z) <= opt.z_tol ? 1 : 0;
      rep.bins.push_back(b);
    }
  rep.pass = rep.n_checked > 0 && rep.n_pass == rep.n_checked;
  return rep;
}

DftReport dft_marginal_check(const Ensemble& fwd, const Ensemble& rev, const DftOptions& opt) {
  std::vector<double> fs;
  for (const auto& s : fwd.samples) fs.push_back(s.sigma);
  const Axis as = make_axis(fs, opt.bins, opt.range_sigmas);
  const int nb = opt.bins;
  std::vector<long> cf(nb, 0), cr(nb, 0);
  for (const auto& s : fwd.samples) {
    const int j = as.bin(s.sigma);
    if (j >= 0) ++cf[j];
  }
  for (const auto& s : rev.samples) {
    const int j = as.bin(s.sigma);
    if (j >= 0) ++cr[j];
  }
  const double Nf = static_cast<double>(fwd.samples.size());
  const double Nr = static_cast<double>(rev.samples.size());

  DftReport rep;
  for (int j = 0; j < nb; ++j) {
    const long nf = cf[j], nr = cr[nb - 1 - j];
    if (nf < opt.min_count || nr < opt.min_count) continue;
    DftBin b;
    b.s_center = as.center(j);
    b.n_fwd = nf;
    b.n_rev = nr;
    b.lhs = std::log((nf / Nf) / (nr / Nr));
    b.rhs = b.s_center;
    b.se = std::sqrt(1.0 / nf + 1.0 / nr);
    b.z = (b.lhs - b.rhs) / b.se;
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(b.z));
    rep.n_checked += 1;
    rep.n_pass += std::abs(b.z) <= opt.z_tol ? 1 : 0;
    rep.bins.push_back(b);
  }
  rep.pass = rep.n_checked > 0 && rep.n_pass == rep.n_checked;
  return rep;
}

}  // namespace qjs
