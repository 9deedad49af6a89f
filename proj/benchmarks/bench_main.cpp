// SPDX-License-Identifier: Apache-2.0
// Microbenchmarks for the hot paths: generator application, matrix
// exponentials, banded step-kernel application, Green/Drazin sector solves,
// the trajectory sampler, and one exact-MGF product integral.

#include <benchmark/benchmark.h>

#include "qjs/ion.hpp"
#include "qjs/lindblad.hpp"
#include "qjs/operator_core.hpp"
#include "qjs/protocol.hpp"
#include "qjs/tilted.hpp"
#include "qjs/trajectory.hpp"

namespace {

using qjs::Mat;
using qjs::Vec;

qjs::IonParams ion_params(int n_max) {
  qjs::IonParams ip;
  ip.n_max = n_max;
  ip.tail_tol = 0.05;  // keep small ladders admissible for benchmarking
  return ip;
}

// Frozen ion model + steady state at a representative protocol time.
struct IonFrame {
  qjs::ModelSpec m;
  qjs::SteadyState ss;
  Mat dh;
};

IonFrame ion_frame(int n_max) {
  const qjs::Protocol p = qjs::ion_protocol(ion_params(n_max));
  const double t = 0.37 * p.tau;
  IonFrame f{p.model(t), p.steady(t), p.dH(t)};
  return f;
}

void BM_ApplyGenerator(benchmark::State& state) {
  const IonFrame f = ion_frame(static_cast<int>(state.range(0)));
  Mat x = f.ss.pi;
  for (auto _ : state) {
    x = qjs::apply_generator(f.m, x);
    benchmark::DoNotOptimize(x.data());
    x += f.ss.pi;  // keep the iterate bounded
  }
}
BENCHMARK(BM_ApplyGenerator)->Arg(10)->Arg(25)->Arg(40);

void BM_Expm(benchmark::State& state) {
  const IonFrame f = ion_frame(static_cast<int>(state.range(0)));
  Mat sum_ll = Mat::Zero(f.m.dim(), f.m.dim());
  for (const auto& j : f.m.jumps) sum_ll += j.L.adjoint() * j.L;
  const Mat a =
      -(qjs::cplx(0, 1) * f.m.H + 0.5 * sum_ll) * 1e-3;  // one sampler step
  for (auto _ : state) {
    const Mat e = qjs::expm(a);
    benchmark::DoNotOptimize(e.data());
  }
}
BENCHMARK(BM_Expm)->Arg(10)->Arg(25)->Arg(40);

void BM_DiagOpApply(benchmark::State& state) {
  const IonFrame f = ion_frame(static_cast<int>(state.range(0)));
  Mat sum_ll = Mat::Zero(f.m.dim(), f.m.dim());
  for (const auto& j : f.m.jumps) sum_ll += j.L.adjoint() * j.L;
  const qjs::DiagOp k0 = qjs::DiagOp::compile(
      qjs::expm(Mat(-(qjs::cplx(0, 1) * f.m.H + 0.5 * sum_ll) * 1e-3)));
  Vec in = Vec::Ones(f.m.dim()).normalized();
  Vec out(f.m.dim());
  for (auto _ : state) {
    k0.apply(in, out);
    benchmark::DoNotOptimize(out.data());
    std::swap(in, out);
  }
}
BENCHMARK(BM_DiagOpApply)->Arg(10)->Arg(25)->Arg(40);

void BM_AdjointGreen(benchmark::State& state) {
  const IonFrame f = ion_frame(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const Mat y = qjs::adjoint_green(f.m, f.ss, f.dh);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_AdjointGreen)->Arg(10)->Arg(25)->Arg(40);

void BM_DrazinApply(benchmark::State& state) {
  const IonFrame f = ion_frame(static_cast<int>(state.range(0)));
  const Mat x = f.ss.pi * f.m.H - f.m.H * f.ss.pi;
  for (auto _ : state) {
    const Mat y = qjs::drazin_apply(f.m, f.ss, x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_DrazinApply)->Arg(10)->Arg(25)->Arg(40);

void BM_SampleQubit(benchmark::State& state) {
  qjs::QubitDriveParams qd;
  qd.tau = 5.0;
  const qjs::Protocol p = qjs::qubit_protocol(qd);
  qjs::SamplerOptions so;
  so.n_traj = state.range(0);
  so.dt = 0.01;
  for (auto _ : state) {
    const qjs::Ensemble e = qjs::sample_ensemble(p, so);
    benchmark::DoNotOptimize(e.samples.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleQubit)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ExactMgfQubit(benchmark::State& state) {
  qjs::QubitDriveParams qd;
  qd.tau = 5.0;
  const qjs::Protocol p = qjs::qubit_protocol(qd);
  qjs::TiltOptions to;
  to.rel_tol = 1e-8;
  for (auto _ : state) {
    const qjs::MgfValue g = qjs::exact_mgf(p, 0.7, 0.1, to);
    benchmark::DoNotOptimize(g.g);
  }
}
BENCHMARK(BM_ExactMgfQubit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
