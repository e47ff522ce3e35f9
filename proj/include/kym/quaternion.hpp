#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <ostream>

#include <Eigen/Dense>

namespace kym {

// q = w + x i + y j + z k, Hamilton product.
template <class T>
struct Quat {
  T w{0}, x{0}, y{0}, z{0};

  Quat() = default;
  Quat(T w_, T x_, T y_, T z_) : w(w_), x(x_), y(y_), z(z_) {}

  template <class U>
  static Quat from(const Quat<U>& q) {
    return {T(q.w), T(q.x), T(q.y), T(q.z)};
  }
  static Quat from_vector(const Eigen::Matrix<T, 4, 1>& v) { return {v(0), v(1), v(2), v(3)}; }
  Eigen::Matrix<T, 4, 1> vector() const { return {w, x, y, z}; }

  static Quat unit(int mu) {
    Quat q;
    q[mu] = T(1);
    return q;
  }

  T& operator[](int i) { return i == 0 ? w : i == 1 ? x : i == 2 ? y : z; }
  const T& operator[](int i) const { return i == 0 ? w : i == 1 ? x : i == 2 ? y : z; }

  Quat conj() const { return {w, -x, -y, -z}; }
  T norm2() const { return w * w + x * x + y * y + z * z; }
  Quat imag() const { return {T(0), x, y, z}; }
  Quat inverse() const {
    T n = norm2();
    return {w / n, -x / n, -y / n, -z / n};
  }

  Quat& operator+=(const Quat& o) { w += o.w; x += o.x; y += o.y; z += o.z; return *this; }
  Quat& operator-=(const Quat& o) { w -= o.w; x -= o.x; y -= o.y; z -= o.z; return *this; }
  Quat& operator*=(const T& s) { w *= s; x *= s; y *= s; z *= s; return *this; }
};

template <class T> Quat<T> operator+(Quat<T> a, const Quat<T>& b) { return a += b; }
template <class T> Quat<T> operator-(Quat<T> a, const Quat<T>& b) { return a -= b; }
template <class T> Quat<T> operator-(const Quat<T>& a) { return {-a.w, -a.x, -a.y, -a.z}; }
template <class T> Quat<T> operator*(Quat<T> a, const T& s) { return a *= s; }
template <class T> Quat<T> operator*(const T& s, Quat<T> a) { return a *= s; }
template <class T> Quat<T> operator/(Quat<T> a, const T& s) { return {a.w / s, a.x / s, a.y / s, a.z / s}; }

template <class T>
Quat<T> operator*(const Quat<T>& a, const Quat<T>& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

// real part of a*b without forming the product
template <class T>
T re_mul(const Quat<T>& a, const Quat<T>& b) {
  return a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z;
}

// -tr pairing in the fundamental representation: 2 Re(p conj(q))
template <class T>
T pair(const Quat<T>& p, const Quat<T>& q) {
  return T(2) * (p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z);
}

template <class T>
Quat<T> commutator(const Quat<T>& a, const Quat<T>& b) {
  return a * b - b * a;
}

using Quatd = Quat<double>;

// a + b j  ->  [[a, b], [-conj(b), conj(a)]]
inline Eigen::Matrix2cd to_matrix(const Quatd& q) {
  std::complex<double> a(q.w, q.x), b(q.y, q.z);
  Eigen::Matrix2cd m;
  m << a, b, -std::conj(b), std::conj(a);
  return m;
}

// inverse of to_matrix on its image; other matrices are projected
inline Quatd from_matrix(const Eigen::Matrix2cd& m) {
  std::complex<double> a = 0.5 * (m(0, 0) + std::conj(m(1, 1)));
  std::complex<double> b = 0.5 * (m(0, 1) - std::conj(m(1, 0)));
  return {a.real(), a.imag(), b.real(), b.imag()};
}

inline std::ostream& operator<<(std::ostream& os, const Quatd& q) {
  return os << '(' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ')';
}

}  // namespace kym
