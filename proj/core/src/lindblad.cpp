// SPDX-License-Identifier: Apache-2.0
#include "qjs/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace qjs {

void ModelSpec::validate(double herm_tol) const {
  if (H.rows() == 0 || H.rows() != H.cols()) throw ConfigError("H must be square and non-empty");
  const double hs = std::max(1.0, H.norm());
  if ((H - H.adjoint()).norm() > herm_tol * hs) throw ConfigError("H is not Hermitian");
  for (const auto& j : jumps) {
    if (j.L.rows() != H.rows() || j.L.cols() != H.cols())
      throw ConfigError("jump operator '" + j.label + "' has wrong shape");
  }
}

Mat apply_generator(const ModelSpec& m, const Mat& x) {
  Mat out = -kI * comm(m.H, x);
  for (const auto& j : m.jumps) {
    const Mat ldl = j.L.adjoint() * j.L;
    out += j.L * x * j.L.adjoint() - 0.5 * acomm(ldl, x);
  }
  return out;
}

Mat apply_adjoint_generator(const ModelSpec& m, const Mat& a) {
  Mat out = kI * comm(m.H, a);
  for (const auto& j : m.jumps) {
    const Mat ldl = j.L.adjoint() * j.L;
    out += j.L.adjoint() * a * j.L - 0.5 * acomm(ldl, a);
  }
  return out;
}

Mat build_generator(const ModelSpec& m) {
  Mat g = -kI * (spre(m.H) - spost(m.H));
  for (const auto& j : m.jumps) {
    const Mat ldl = j.L.adjoint() * j.L;
    g += sandwich(j.L, j.L.adjoint()) - 0.5 * (spre(ldl) + spost(ldl));
  }
  return g;
}

Mat build_adjoint_generator(const ModelSpec& m) {
  Mat g = kI * (spre(m.H) - spost(m.H));
  for (const auto& j : m.jumps) {
    const Mat ldl = j.L.adjoint() * j.L;
    g += sandwich(j.L.adjoint(), j.L) - 0.5 * (spre(ldl) + spost(ldl));
  }
  return g;
}

// ---- stationary states -------------------------------------------------------

SteadyState steady_state(const ModelSpec& m, const SteadyStateOptions& opt) {
  m.validate();
  const int d = m.dim();
  const Mat g = build_generator(m);
  Eigen::ComplexEigenSolver<Mat> es(g);
  if (es.info() != Eigen::Success) throw NumericError("generator eigensolver failed");
  const auto& ev = es.eigenvalues();

  Eigen::Index i0 = 0;
  double best = std::abs(ev[0]);
  for (Eigen::Index i = 1; i < ev.size(); ++i)
    if (std::abs(ev[i]) < best) best = std::abs(ev[i]), i0 = i;

  double second = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (i == i0) continue;
    second = std::min(second, std::abs(ev[i]));
    gap = std::min(gap, -ev[i].real());
  }
  if (second < opt.degeneracy_tol)
    throw DegenerateSteadyStateError("second generator mode within degeneracy_tol of zero");

  Mat pi = unvectorize(es.eigenvectors().col(i0), d);
  pi = 0.5 * (pi + Mat(pi.adjoint()));
  const cplx tr = pi.trace();
  if (std::abs(tr) < 1e-14) throw NumericError("stationary mode has vanishing trace");
  pi /= tr;

  SteadyState ss;
  ss.spec = SpectralDecomp::hermitian(pi);
  if (ss.spec.min_eval() < -1e-10)
    throw NumericError("stationary state has a significantly negative eigenvalue");
  if (ss.spec.min_eval() <= opt.faithful_tol)
    throw NonFaithfulError("stationary state is not faithful at the requested tolerance");
  ss.pi = pi;
  ss.residual = apply_generator(m, pi).norm();
  if (opt.want_gap) ss.gap = gap;
  return ss;
}

SteadyState thermal_state(const ModelSpec& m, double beta, double residual_tol) {
  m.validate();
  const SpectralDecomp hd = SpectralDecomp::hermitian(m.H);
  const double e0 = hd.eval.minCoeff();  // shift for overflow safety
  const Eigen::Index d = hd.eval.size();
  RVec w(d);
  for (Eigen::Index i = 0; i < d; ++i) w[i] = std::exp(-beta * (hd.eval[i] - e0));
  w /= w.sum();

  // Keep the analytic weights as the spectral data (ascending, to match the
  // eigensolver convention) instead of re-diagonalising pi: tail populations
  // far below machine epsilon stay relatively accurate this way.
  std::vector<Eigen::Index> order(d);
  for (Eigen::Index i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&w](Eigen::Index a, Eigen::Index b) { return w[a] < w[b]; });
  SteadyState ss;
  ss.spec.eval = RVec(d);
  ss.spec.evec = Mat(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    ss.spec.eval[i] = w[order[i]];
    ss.spec.evec.col(i) = hd.evec.col(order[i]);
  }
  const Mat pi = ss.spec.evec * ss.spec.eval.asDiagonal() * ss.spec.evec.adjoint();
  ss.pi = 0.5 * (pi + Mat(pi.adjoint()));
  ss.residual = apply_generator(m, ss.pi).norm();
  if (ss.residual > residual_tol) {
    std::ostringstream os;
    os << "thermal state is not stationary: residual " << ss.residual;
    throw NumericError(os.str());
  }
  return ss;
}

double log_partition(const Mat& H, double beta) {
  const SpectralDecomp hd = SpectralDecomp::hermitian(H);
  const double e0 = hd.eval.minCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < hd.eval.size(); ++i) s += std::exp(-beta * (hd.eval[i] - e0));
  return std::log(s) - beta * e0;
}

// ---- restricted solver -------------------------------------------------------

namespace {

// Joint frame: unitary W whose columns order pi eigenvalues ascending and
// diagonalize H within each pi eigenspace.
struct JointFrame {
  Mat W;
  RVec p;   // pi spectrum in frame order
  RVec E;   // diag of W^+ H W (exact eigenvalues iff [H, pi] = 0)
};

JointFrame make_joint_frame(const Mat& H, const SpectralDecomp& pspec) {
  const int d = static_cast<int>(pspec.eval.size());
  JointFrame f;
  f.W = pspec.evec;
  f.p = pspec.eval;
  const double pscale = std::max(1e-300, pspec.eval.cwiseAbs().maxCoeff());
  int i = 0;
  while (i < d) {
    int j = i + 1;
    while (j < d && std::abs(f.p[j] - f.p[j - 1]) <= 1e-10 * pscale) ++j;
    if (j - i > 1) {
      const Mat hb = f.W.middleCols(i, j - i).adjoint() * H * f.W.middleCols(i, j - i);
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (hb + Mat(hb.adjoint())));
      f.W.middleCols(i, j - i) = f.W.middleCols(i, j - i) * es.eigenvectors();
    }
    i = j;
  }
  f.E = (f.W.adjoint() * H * f.W).diagonal().real();
  return f;
}

}  // namespace

struct RestrictedSolver::Impl {
  int d = 0;
  Side side = Side::Adjoint;
  JointFrame frame;
  ModelSpec mf;  // model rotated into the frame
  Mat Mhalf;     // (1/2) sum L^+ L, in frame

  struct Sector {
    std::vector<std::pair<int, int>> elems;  // (row, col) in frame
    Eigen::FullPivLU<Mat> lu;                // bordered for the zero sector
    bool bordered = false;
  };
  std::vector<Sector> sectors;
  std::vector<int> sector_of;  // (i * d + j) -> sector index
  bool sectored = false;
  double off_mass = 0.0;

  std::optional<Eigen::FullPivLU<Mat>> dense_lu;  // bordered (d^2+1)
  RVec kernel_weight;  // constraint weights on the diagonal: p (Adjoint) or 1 (Schrodinger)

  // action of the (adjoint) generator on the basis element e_k e_l^+,
  // written as a dense d x d matrix in the frame
  Mat column_action(int k, int l) const {
    Mat out = Mat::Zero(d, d);
    const double sgn = (side == Side::Adjoint) ? 1.0 : -1.0;
    // coherent part uses the full rotated H (handles [H, pi] != 0 too)
    const Mat& Hf = mf.H;
    out.col(l) += sgn * kI * Hf.col(k);
    out.row(k) -= sgn * kI * Hf.row(l);
    for (const auto& j : mf.jumps) {
      if (side == Side::Adjoint) {
        const Vec a = j.L.adjoint().col(k);
        const Vec b = j.L.adjoint().col(l);
        out.noalias() += a * b.adjoint();
      } else {
        const Vec a = j.L.col(k);
        const Vec b = j.L.col(l);
        out.noalias() += a * b.adjoint();
      }
    }
    out.col(l) -= Mhalf.col(k);
    out.row(k) -= Mhalf.row(l);
    return out;
  }
};

RestrictedSolver::RestrictedSolver(const ModelSpec& m, const SteadyState& ss, Side side,
                                   double sector_tol) {
  impl_ = std::make_shared<Impl>();
  Impl& im = *impl_;
  im.d = m.dim();
  im.side = side;
  im.frame = make_joint_frame(m.H, ss.spec);
  const Mat& W = im.frame.W;
  im.mf.H = W.adjoint() * m.H * W;
  for (const auto& j : m.jumps) im.mf.jumps.push_back({j.label, W.adjoint() * j.L * W});
  Mat M = Mat::Zero(im.d, im.d);
  for (const auto& j : im.mf.jumps) M += j.L.adjoint() * j.L;
  im.Mhalf = 0.5 * M;

  const int d = im.d;
  im.kernel_weight = RVec(d);
  for (int i = 0; i < d; ++i)
    im.kernel_weight[i] = (side == Side::Adjoint) ? im.frame.p[i] : 1.0;

  // group matrix elements by the (dphi, dE) label pair
  const RVec phi = (-im.frame.p.array().log()).matrix();
  struct Key {
    long a, b;
    bool operator<(const Key& o) const { return a != o.a ? a < o.a : b < o.b; }
  };
  const double phi_scale = std::max(1.0, phi.cwiseAbs().maxCoeff());
  const double e_scale = std::max(1.0, im.frame.E.cwiseAbs().maxCoeff());
  auto quant = [&](double x, double s) { return std::lround(x / (sector_tol * s)); };
  std::map<Key, int> ids;
  im.sector_of.assign(static_cast<size_t>(d) * d, -1);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Key key{quant(phi[i] - phi[j], phi_scale), quant(im.frame.E[i] - im.frame.E[j], e_scale)};
      auto it = ids.find(key);
      int id;
      if (it == ids.end()) {
        id = static_cast<int>(im.sectors.size());
        ids.emplace(key, id);
        im.sectors.emplace_back();
      } else {
        id = it->second;
      }
      im.sector_of[static_cast<size_t>(i) * d + j] = id;
      im.sectors[id].elems.emplace_back(i, j);
    }
  const int zero_id = ids[Key{0, 0}];

  // build per-sector blocks, tracking how much action leaks across sectors
  double leak2 = 0.0, total2 = 0.0;
  std::vector<Mat> blocks(im.sectors.size());
  for (size_t s = 0; s < im.sectors.size(); ++s) {
    const auto& el = im.sectors[s].elems;
    const int msz = static_cast<int>(el.size());
    Mat A(msz, msz);
    for (int c = 0; c < msz; ++c) {
      const Mat col = im.column_action(el[c].first, el[c].second);
      double in2 = 0.0;
      for (int r = 0; r < msz; ++r) {
        A(r, c) = col(el[r].first, el[r].second);
        in2 += std::norm(A(r, c));
      }
      const double tot = col.squaredNorm();
      leak2 += std::max(0.0, tot - in2);
      total2 += tot;
    }
    blocks[s] = std::move(A);
  }
  off_sector_mass_ = std::sqrt(leak2 / std::max(total2, 1e-300));
  im.off_mass = off_sector_mass_;

  if (off_sector_mass_ <= sector_tol && im.sectors.size() > 1) {
    // factor every sector; border the zero sector with kernel + constraint
    for (size_t s = 0; s < im.sectors.size(); ++s) {
      auto& sec = im.sectors[s];
      const int msz = static_cast<int>(sec.elems.size());
      if (static_cast<int>(s) == zero_id) {
        // Adjoint: range complement ~ pi, constraint tr[Y pi] = 0.
        // Schrodinger: range complement ~ 1, constraint tr Y = 0.
        Mat B = Mat::Zero(msz + 1, msz + 1);
        B.topLeftCorner(msz, msz) = blocks[s];
        for (int r = 0; r < msz; ++r) {
          const auto [i, j] = sec.elems[r];
          const double wgt = (i == j) ? im.kernel_weight[i] : 0.0;
          B(r, msz) = wgt;
          B(msz, r) = wgt;
        }
        sec.bordered = true;
        sec.lu = Eigen::FullPivLU<Mat>(B);
        if (!sec.lu.isInvertible())
          throw SingularRestrictionError("bordered zero sector is singular");
      } else {
        sec.lu = Eigen::FullPivLU<Mat>(blocks[s]);
        if (!sec.lu.isInvertible())
          throw SingularRestrictionError("nonzero sector block is singular (extra stationary mode?)");
      }
    }
    im.sectored = true;
    sectored_ = true;
    return;
  }

  // dense fallback: one bordered (d^2 + 1) system in the frame
  Mat G = (im.side == Side::Adjoint) ? build_adjoint_generator(im.mf) : build_generator(im.mf);
  const Eigen::Index n = G.rows();
  Mat B = Mat::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n) = G;
  for (int i = 0; i < d; ++i) {
    const Eigen::Index diag = static_cast<Eigen::Index>(i) * d + i;
    const double wgt = (im.side == Side::Adjoint) ? im.frame.p[i] : 1.0;
    B(diag, n) = wgt;
    B(n, diag) = wgt;
  }
  im.dense_lu.emplace(B);
  if (!im.dense_lu->isInvertible())
    throw SingularRestrictionError("bordered generator is singular");
  sectored_ = false;
}

Mat RestrictedSolver::solve(const Mat& r) const {
  const Impl& im = *impl_;
  const int d = im.d;
  const Mat rf = im.frame.W.adjoint() * r * im.frame.W;
  Mat yf(d, d);

  if (im.sectored) {
    for (const auto& sec : im.sectors) {
      const int msz = static_cast<int>(sec.elems.size());
      if (sec.bordered) {
        Vec rhs = Vec::Zero(msz + 1);
        for (int k = 0; k < msz; ++k) rhs[k] = rf(sec.elems[k].first, sec.elems[k].second);
        const Vec sol = sec.lu.solve(rhs);
        for (int k = 0; k < msz; ++k) yf(sec.elems[k].first, sec.elems[k].second) = sol[k];
      } else {
        Vec rhs(msz);
        for (int k = 0; k < msz; ++k) rhs[k] = rf(sec.elems[k].first, sec.elems[k].second);
        const Vec sol = sec.lu.solve(rhs);
        for (int k = 0; k < msz; ++k) yf(sec.elems[k].first, sec.elems[k].second) = sol[k];
      }
    }
  } else {
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    Vec rhs = Vec::Zero(n + 1);
    rhs.head(n) = vectorize(rf);
    const Vec sol = im.dense_lu->solve(rhs);
    yf = unvectorize(sol.head(n), d);
  }
  return im.frame.W * yf * im.frame.W.adjoint();
}

Mat drazin_apply(const ModelSpec& m, const SteadyState& ss, const Mat& x) {
  RestrictedSolver rs(m, ss, RestrictedSolver::Side::Schrodinger);
  return rs.solve(x - x.trace() * ss.pi);
}

Mat adjoint_green(const ModelSpec& m, const SteadyState& ss, const Mat& a) {
  RestrictedSolver rs(m, ss, RestrictedSolver::Side::Adjoint);
  const Mat da = a - (ss.pi * a).trace() * Mat::Identity(m.dim(), m.dim());
  return rs.solve(Mat(-da));
}

// ---- structure checks --------------------------------------------------------

ModularFit modular_fit(const RVec& lnp, const Mat& lb) {
  const int d = static_cast<int>(lb.rows());
  double num = 0.0, den = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double w = std::norm(lb(i, j));
      num += w * (lnp[j] - lnp[i]);
      den += w;
    }
  ModularFit out;
  out.dphi = num / std::max(den, 1e-300);
  double spread = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double x = lnp[j] - lnp[i] - out.dphi;
      spread += std::norm(lb(i, j)) * x * x;
    }
  out.residual = std::sqrt(spread / std::max(den, 1e-300));
  return out;
}

PrivilegedStructure check_structure(const ModelSpec& m, const SteadyState& ss, double tol) {
  PrivilegedStructure out;
  out.tol = tol;
  const int d = m.dim();
  const Mat& pi = ss.pi;

  out.h_commute_residual =
      comm(m.H, pi).norm() / std::max(1e-300, m.H.norm() * pi.norm());

  RVec lnp(ss.spec.eval.size());
  for (Eigen::Index i = 0; i < lnp.size(); ++i) {
    if (ss.spec.eval[i] <= 0.0)
      throw NonFaithfulError("stationary state has a non-positive eigenvalue");
    lnp[i] = std::log(ss.spec.eval[i]);
  }
  bool priv = true;
  for (const auto& j : m.jumps) {
    const Mat lb = ss.spec.evec.adjoint() * j.L * ss.spec.evec;
    const ModularFit fit = modular_fit(lnp, lb);
    out.dphi.push_back(fit.dphi);
    out.jump_residual.push_back(fit.residual);
    priv = priv && fit.residual <= tol;
  }
  out.privileged = priv;

  // covariance: each jump an eigenoperator of [H, .]
  double cres = 0.0;
  for (const auto& j : m.jumps) {
    const Mat g = comm(m.H, j.L);
    const cplx c = (j.L.adjoint() * g).trace() / std::max(1e-300, j.L.squaredNorm());
    cres = std::max(cres, (g - c * j.L).norm() /
                              std::max(1e-300, m.H.norm() * j.L.norm()));
  }
  out.covariance_residual = cres;
  out.covariant = out.h_commute_residual <= tol && cres <= tol;

  // detailed balance: the completely positive jump part must be invariant
  // under the modular conjugation L_x -> A_x = e^{dphi_x/2} L_x^dagger, i.e.
  // M = sum_x |vec L_x><vec L_x| must equal M' = sum_x |vec A_x><vec A_x|.
  // Stack u = [vec L_1..L_k, vec A_1..A_k] and S = diag(+1..,-1..): with the
  // QR factorisation u = QR, ||M - M'||_F = ||R S R^dag||_F. The difference
  // of the two ensembles cancels linearly inside R S R^dag, so the noise
  // floor stays near machine epsilon and steep stationary spectra are never
  // inverted. (The Hamiltonian part of the KMS condition is [H, pi] = 0,
  // reported in h_commute_residual.)
  const int k = static_cast<int>(m.jumps.size());
  const int dd = d * d;
  Mat u(dd, 2 * k);
  for (int x = 0; x < k; ++x) {
    u.col(x) = vectorize(m.jumps[x].L);
    u.col(k + x) =
        std::exp(0.5 * out.dphi[x]) * vectorize(Mat(m.jumps[x].L.adjoint()));
  }
  const Eigen::HouseholderQR<Mat> qr(u);
  const int rk = std::min(dd, 2 * k);
  const Mat r = Mat(qr.matrixQR().topRows(rk).triangularView<Eigen::Upper>());
  RVec sign(2 * k);
  sign.head(k).setOnes();
  sign.tail(k).setConstant(-1.0);
  const double diff = (r * sign.asDiagonal() * r.adjoint()).norm();
  const Mat gl = u.leftCols(k).adjoint() * u.leftCols(k);
  const Mat ga = u.rightCols(k).adjoint() * u.rightCols(k);
  const double scale = std::max({gl.norm(), ga.norm(), 1e-300});
  const double db = diff / scale;
  out.db_residual = db;
  out.detailed_balance =
      out.privileged && out.h_commute_residual <= tol && db <= tol;
  return out;
}

}  // namespace qjs
