// SPDX-License-Identifier: Apache-2.0
// Gauss-Legendre panels and adaptive scalar quadrature.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "qjs/types.hpp"

namespace qjs {

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1], computed by
// Newton iteration on the Legendre polynomial (deterministic, no tables).
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
      // Chebyshev-like initial guess for the i-th root.
      double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * xi * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (xi * p0 - p1) / (xi * xi - 1.0);
        double dx = p0 / pp;
        xi -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      x[i] = xi;
      w[i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
    }
  }
};

// Fixed-panel composite Gauss-Legendre integral of f over [a, b].
inline double integrate_gl(const std::function<double(double)>& f, double a,
                           double b, int points_per_panel = 64,
                           int panels = 1) {
  static thread_local int cached_n = -1;
  static thread_local GaussLegendre* cached = nullptr;
  if (cached_n != points_per_panel) {
    delete cached;
    cached = new GaussLegendre(points_per_panel);
    cached_n = points_per_panel;
  }
  const GaussLegendre& gl = *cached;
  double total = 0.0;
  const double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * hp;
    const double mid = lo + 0.5 * hp, half = 0.5 * hp;
    double acc = 0.0;
    for (int i = 0; i < points_per_panel; ++i)
      acc += gl.w[i] * f(mid + half * gl.x[i]);
    total += acc * half;
  }
  return total;
}

// Panel-doubling adaptive quadrature: doubles the panel count of a composite
// 16-point rule until two successive refinements agree to tol (absolute +
// relative). Returns the refined value; *err_out gets the last difference.
inline double integrate_adaptive(const std::function<double(double)>& f,
                                 double a, double b, double tol = 1e-10,
                                 double* err_out = nullptr,
                                 int max_doublings = 12) {
  int panels = 1;
  double prev = integrate_gl(f, a, b, 16, panels);
  double err = std::abs(prev);
  for (int k = 0; k < max_doublings; ++k) {
    panels *= 2;
    const double next = integrate_gl(f, a, b, 16, panels);
    err = std::abs(next - prev);
    prev = next;
    if (err <= tol * (1.0 + std::abs(next))) break;
  }
  if (err_out) *err_out = err;
  return prev;
}

}  // namespace qjs
