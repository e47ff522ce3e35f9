#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "kym/quaternion.hpp"

namespace kym {

// Real 2-forms on R^4 with coordinates x0..x3, z1 = x0 + i x1, z2 = x2 + i x3.
// Components stored in the order 01, 02, 03, 12, 13, 23.
constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

constexpr int pair_index(int mu, int nu) {
  if (mu > nu) return pair_index(nu, mu);
  if (mu == 0) return nu - 1;
  if (mu == 1) return nu + 1;
  return 5;
}

template <class V>
struct TwoForm {
  std::array<V, 6> c{};

  V operator()(int mu, int nu) const {
    if (mu == nu) return V{};
    V v = c[pair_index(mu, nu)];
    return mu < nu ? v : -v;
  }
  void add(int mu, int nu, const V& v) {
    if (mu == nu) return;
    if (mu < nu)
      c[pair_index(mu, nu)] += v;
    else
      c[pair_index(mu, nu)] -= v;
  }
  TwoForm& operator+=(const TwoForm& o) {
    for (int a = 0; a < 6; ++a) c[a] += o.c[a];
    return *this;
  }
  TwoForm& operator-=(const TwoForm& o) {
    for (int a = 0; a < 6; ++a) c[a] -= o.c[a];
    return *this;
  }
};

template <class V> TwoForm<V> operator+(TwoForm<V> a, const TwoForm<V>& b) { return a += b; }
template <class V> TwoForm<V> operator-(TwoForm<V> a, const TwoForm<V>& b) { return a -= b; }
template <class V, class S>
TwoForm<V> operator*(const S& s, TwoForm<V> a) {
  for (auto& v : a.c) v = v * s;
  return a;
}

using QForm = TwoForm<Quatd>;
using RForm = TwoForm<double>;

inline double value_pair(double a, double b) { return a * b; }
inline double value_pair(const Quatd& a, const Quatd& b) { return pair(a, b); }

// Multiplication by i on C^2 as a real 4x4 matrix acting on column vectors.
inline Eigen::Matrix4d complex_structure() {
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J(1, 0) = 1;
  J(0, 1) = -1;
  J(3, 2) = 1;
  J(2, 3) = -1;
  return J;
}

// Riemannian metric Re(Z^T g conj(W)) of a Hermitian matrix g_{j kbar}.
inline Eigen::Matrix4d real_metric(const Eigen::Matrix2cd& g) {
  using C = std::complex<double>;
  std::array<Eigen::Vector2cd, 4> e;
  e[0] << C(1, 0), C(0, 0);
  e[1] << C(0, 1), C(0, 0);
  e[2] << C(0, 0), C(1, 0);
  e[3] << C(0, 0), C(0, 1);
  Eigen::Matrix4d G;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) G(m, n) = (e[m].transpose() * g * e[n].conjugate())(0, 0).real();
  return G;
}

// Pointwise metric data for the 4D algebra.
struct MetricPoint {
  Eigen::Matrix4d G;
  Eigen::Matrix4d Ginv;
  Eigen::Matrix4d omega;      // omega_{mu nu} = G(J e_mu, e_nu)
  Eigen::Matrix4d omega_up;   // indices raised
  double sqrt_det = 1;

  MetricPoint() : MetricPoint(Eigen::Matrix4d::Identity()) {}
  explicit MetricPoint(const Eigen::Matrix4d& g) : G(g) {
    Ginv = G.inverse();
    omega = complex_structure().transpose() * G;
    omega_up = Ginv * omega * Ginv.transpose();
    sqrt_det = std::sqrt(G.determinant());
  }
  static MetricPoint hermitian(const Eigen::Matrix2cd& g) { return MetricPoint(real_metric(g)); }
};

inline RForm kahler_form(const MetricPoint& m) {
  RForm w;
  for (int a = 0; a < 6; ++a) w.c[a] = m.omega(kPairs[a][0], kPairs[a][1]);
  return w;
}

// Lambda F = 1/2 omega^{mu nu} F_{mu nu}
template <class V>
V lambda(const TwoForm<V>& F, const MetricPoint& m) {
  V out{};
  for (int a = 0; a < 6; ++a) {
    int mu = kPairs[a][0], nu = kPairs[a][1];
    out += F.c[a] * m.omega_up(mu, nu);
  }
  return out;
}

// |F|^2 = 1/2 F_{mu nu} F_{rho sigma} G^{mu rho} G^{nu sigma}
template <class V>
double norm2(const TwoForm<V>& F, const MetricPoint& m) {
  double s = 0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      for (int rho = 0; rho < 4; ++rho)
        for (int sg = 0; sg < 4; ++sg) {
          double w = m.Ginv(mu, rho) * m.Ginv(nu, sg);
          if (w == 0) continue;
          s += w * value_pair(F(mu, nu), F(rho, sg));
        }
  return 0.5 * s;
}

inline int levi_civita(int a, int b, int c, int d) {
  std::array<int, 4> p{a, b, c, d};
  int sign = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      if (p[i] == p[j]) return 0;
      if (p[i] > p[j]) sign = -sign;
    }
  return sign;
}

// (*F)_{rho sigma} = 1/2 sqrt(det G) eps_{mu nu rho sigma} F^{mu nu}
template <class V>
TwoForm<V> hodge(const TwoForm<V>& F, const MetricPoint& m) {
  std::array<std::array<V, 4>, 4> up{};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      V s{};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double w = m.Ginv(mu, a) * m.Ginv(nu, b);
          if (w != 0) s += F(a, b) * w;
        }
      up[mu][nu] = s;
    }
  TwoForm<V> out;
  for (int k = 0; k < 6; ++k) {
    int rho = kPairs[k][0], sg = kPairs[k][1];
    V s{};
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        int e = levi_civita(mu, nu, rho, sg);
        if (e != 0) s += up[mu][nu] * double(e);
      }
    out.c[k] = s * (0.5 * m.sqrt_det);
  }
  return out;
}

template <class V>
TwoForm<V> self_dual_part(const TwoForm<V>& F, const MetricPoint& m) {
  return 0.5 * (F + hodge(F, m));
}

template <class V>
TwoForm<V> anti_self_dual_part(const TwoForm<V>& F, const MetricPoint& m) {
  return 0.5 * (F - hodge(F, m));
}

// coefficient of dx0123 in a^b, contracted with the value pairing
template <class V>
double wedge_coefficient(const TwoForm<V>& a, const TwoForm<V>& b) {
  auto p = [](const V& u, const V& v) { return value_pair(u, v); };
  return p(a.c[0], b.c[5]) - p(a.c[1], b.c[4]) + p(a.c[2], b.c[3]) + p(a.c[3], b.c[2]) -
         p(a.c[4], b.c[1]) + p(a.c[5], b.c[0]);
}

// tr(F^F) against dx0123, quaternion values read as su(2) matrices
inline double trace_wedge_coefficient(const QForm& F) {
  return 4.0 * (re_mul(F.c[0], F.c[5]) - re_mul(F.c[1], F.c[4]) + re_mul(F.c[2], F.c[3]));
}

// Lambda^2 of a 4-form given by its dx0123 coefficient
inline double lambda2_of_coefficient(double coeff, const MetricPoint& m) { return 2.0 * coeff / m.sqrt_det; }

// Lambda^2 (F ^ F) with the -tr pairing
inline double lambda2_wedge(const QForm& F, const MetricPoint& m) {
  return lambda2_of_coefficient(wedge_coefficient(F, F), m);
}

// F(J., J.) on the real components
template <class V>
TwoForm<V> j_rotate(const TwoForm<V>& F) {
  Eigen::Matrix4d J = complex_structure();
  TwoForm<V> out;
  for (int k = 0; k < 6; ++k) {
    int mu = kPairs[k][0], nu = kPairs[k][1];
    V s{};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double w = J(a, mu) * J(b, nu);
        if (w != 0) s += F(a, b) * w;
      }
    out.c[k] = s;
  }
  return out;
}

// (2,0)+(0,2) component; |F^{0,2}|^2 = 1/2 |F^{J-anti}|^2
template <class V>
TwoForm<V> j_anti_part(const TwoForm<V>& F) {
  return 0.5 * (F - j_rotate(F));
}

template <class V>
double norm2_02(const TwoForm<V>& F, const MetricPoint& m) {
  return 0.5 * norm2(j_anti_part(F), m);
}

// F = sum F_{j kbar} dz_j ^ dzbar_k with 2x2 matrix coefficients (su(2) valued result).
inline QForm from_complex_components(const std::array<std::array<Eigen::Matrix2cd, 2>, 2>& M) {
  using C = std::complex<double>;
  const C I(0, 1);
  std::array<Eigen::Matrix2cd, 16> real{};
  for (auto& r : real) r.setZero();
  auto at = [&](int a, int b) -> Eigen::Matrix2cd& { return real[4 * a + b]; };
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      int a = 2 * j, b = 2 * j + 1, c = 2 * k, d = 2 * k + 1;
      const Eigen::Matrix2cd& m = M[j][k];
      // (dx_a + i dx_b) ^ (dx_c - i dx_d)
      at(a, c) += m;
      at(c, a) -= m;
      at(a, d) += -I * m;
      at(d, a) -= -I * m;
      at(b, c) += I * m;
      at(c, b) -= I * m;
      at(b, d) += m;
      at(d, b) -= m;
    }
  QForm F;
  for (int k = 0; k < 6; ++k) F.c[k] = from_matrix(at(kPairs[k][0], kPairs[k][1]));
  return F;
}

}  // namespace kym
