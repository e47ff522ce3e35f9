#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "kym/numerics.hpp"

namespace kym {

// Radial nodes r_0 < ... < r_{N-1} with cell faces rh[i] = r_{i-1/2}, i = 0..N.
struct RadialGrid {
  enum class Kind { origin, annulus };

  Kind kind = Kind::origin;
  Eigen::VectorXd r;
  Eigen::VectorXd rh;
  double stretch = 1;  // origin grids: r = stretch * sinh(xi)
  double dxi = 0;

  // r_i = a sinh((i + 1/2) dxi), regular at r = 0 through even reflection
  static RadialGrid origin(double a, double r_max, int n) {
    if (n < 8 || a <= 0 || r_max <= 0) throw InputError("radial grid needs n >= 8 and positive extent");
    RadialGrid g;
    g.kind = Kind::origin;
    g.stretch = a;
    g.dxi = std::asinh(r_max / a) / (n - 0.5);
    g.r.resize(n);
    g.rh.resize(n + 1);
    for (int i = 0; i < n; ++i) g.r(i) = a * std::sinh((i + 0.5) * g.dxi);
    for (int i = 0; i < n; ++i) g.rh(i) = a * std::sinh(i * g.dxi);
    g.rh(n) = g.r(n - 1);
    return g;
  }

  // log-spaced nodes including both ends
  static RadialGrid annulus(double r_min, double r_max, int n) {
    if (n < 4 || r_min <= 0 || r_max <= r_min) throw InputError("annulus grid needs 0 < r_min < r_max");
    RadialGrid g;
    g.kind = Kind::annulus;
    g.dxi = std::log(r_max / r_min) / (n - 1);
    g.r.resize(n);
    g.rh.resize(n + 1);
    for (int i = 0; i < n; ++i) g.r(i) = r_min * std::exp(i * g.dxi);
    g.rh(0) = g.r(0);
    for (int i = 1; i < n; ++i) g.rh(i) = std::sqrt(g.r(i - 1) * g.r(i));
    g.rh(n) = g.r(n - 1);
    return g;
  }

  RadialGrid scaled(double c) const {
    RadialGrid g = *this;
    g.r *= c;
    g.rh *= c;
    g.stretch *= c;
    return g;
  }

  int size() const { return int(r.size()); }
  double s(int i) const { return r(i) * r(i); }
  double sh(int i) const { return rh(i) * rh(i); }
  double r_max() const { return r(r.size() - 1); }
  bool origin_regular() const { return kind == Kind::origin; }

  // weights for int f dvol over R^4 with f radial: 2 pi^2 int f r^3 dr
  Eigen::VectorXd volume_weights() const {
    const int n = size();
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
      double a = rh(i), b = rh(i + 1);
      w(i) = 0.5 * M_PI * M_PI * (b * b * b * b - a * a * a * a);
    }
    return w;
  }
};

// d/ds at node i with the grid's boundary treatment
template <class T>
T ds_at(const RadialGrid& g, const T* v, int i) {
  const int n = g.size();
  if (i == 0) {
    if (g.origin_regular()) return (v[1] - v[0]) / (g.s(1) - g.s(0));
    auto w = d1_weights(g.s(0), g.s(0), g.s(1), g.s(2));
    return w[0] * v[0] + w[1] * v[1] + w[2] * v[2];
  }
  if (i == n - 1) {
    auto w = d1_weights(g.s(n - 1), g.s(n - 3), g.s(n - 2), g.s(n - 1));
    return w[0] * v[n - 3] + w[1] * v[n - 2] + w[2] * v[n - 1];
  }
  return (v[i + 1] - v[i - 1]) / (g.s(i + 1) - g.s(i - 1));
}

// Radial Kahler metric on C^2 from p = d phi / ds:
// g1 = 1 + p + s p_s (radial), g2 = 1 + p (transverse), L = log det g.
template <class T>
struct RadialMetricJets {
  std::vector<T> q, g1, g2, L;
};

template <class T>
RadialMetricJets<T> radial_metric_jets(const RadialGrid& g, const T* p) {
  const int n = g.size();
  RadialMetricJets<T> j;
  j.q.resize(n);
  j.g1.resize(n);
  j.g2.resize(n);
  j.L.resize(n);
  for (int i = 0; i < n; ++i) {
    j.q[i] = g.s(i) * ds_at(g, p, i);
    j.g1[i] = 1.0 + p[i] + j.q[i];
    j.g2[i] = 1.0 + p[i];
    j.L[i] = log1p_(T(p[i])) + log1p_(T(p[i] + j.q[i]));
  }
  return j;
}

// S = -(4/(s D)) (s^2 (1+p) L_s)_s in flux form; valid for i = 0..N-2 on origin grids.
template <class T>
T radial_scalar_curvature(const RadialGrid& g, const T* p, const RadialMetricJets<T>& j, int i) {
  auto flux = [&](int k) -> T {  // at face k + 1/2
    T pm = 0.5 * (p[k] + p[k + 1]);
    return g.sh(k + 1) * g.sh(k + 1) * (1.0 + pm) * (j.L[k + 1] - j.L[k]) / (g.s(k + 1) - g.s(k));
  };
  T right = flux(i);
  T left = i == 0 ? T(0.0) : flux(i - 1);
  T D = j.g1[i] * j.g2[i];
  return -4.0 * (right - left) / (g.s(i) * D * (g.sh(i + 1) - g.sh(i)));
}

// Seed profile psi0 = -log(1 + b s) and its s-derivatives.
struct SeedProfile {
  double b = 1;
  double psi(double s) const { return -std::log1p(b * s); }
  double dpsi(double s) const { return -b / (1 + b * s); }
  double a1(double s) const { return b / ((1 + b * s) * (1 + b * s)); }
};

// Curvature scalars of the Hermitian metric exp(psi) P + exp(-psi) P^perp, psi = psi0 + f,
// in the unitary frame at (r, 0): F_11 = A1 sigma, F_22 = A2 sigma, off-diagonal B.
template <class T>
struct RadialCurvature {
  T A1, A2, B;
};

template <class T>
RadialCurvature<T> radial_curvature(const RadialGrid& g, const SeedProfile& seed, const T* f, int i) {
  const int n = g.size();
  const double s = g.s(i);
  auto flux = [&](int k) -> T {  // s f_s at face k + 1/2
    return g.sh(k + 1) * (f[k + 1] - f[k]) / (g.s(k + 1) - g.s(k));
  };
  T a1f;
  if (i < n - 1) {
    T right = flux(i);
    T left = i == 0 ? T(0.0) : flux(i - 1);
    a1f = -(right - left) / (g.sh(i + 1) - g.sh(i));
  } else {
    // extrapolated from the two previous faces
    T right = 2.0 * flux(n - 2) - flux(n - 3);
    a1f = -(right - flux(n - 2)) / (g.sh(n) - g.sh(n - 1));
  }
  T fs = ds_at(g, f, i);
  T psi = seed.psi(s) + f[i];
  T dpsi = seed.dpsi(s) + fs;
  RadialCurvature<T> c;
  c.A1 = seed.a1(s) + a1f;
  c.A2 = expm1_(T(2.0 * psi)) / s - dpsi;
  using std::exp;
  c.B = -2.0 * exp(psi) * dpsi;
  return c;
}

// Lambda F = ell * tau and *tr(F^F) = T for the metric diag(g1, g2).
template <class T>
T radial_lambda_coefficient(const RadialCurvature<T>& c, const T& g1, const T& g2) {
  return -2.0 * (c.A1 / g1 + c.A2 / g2);
}

template <class T>
T radial_trace_density(const RadialCurvature<T>& c, const T& g1, const T& g2) {
  return (8.0 * c.B * c.B - 16.0 * c.A1 * c.A2) / (g1 * g2);
}

}  // namespace kym
