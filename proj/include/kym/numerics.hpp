#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>

namespace kym {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pairwise summation; the order is fixed by the index layout only.
inline double tree_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() <= 8) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t h = v.size() / 2;
  return tree_sum(v.first(h)) + tree_sum(v.subspan(h));
}

inline double tree_sum(const Eigen::VectorXd& v) { return tree_sum(std::span<const double>(v.data(), v.size())); }
inline double tree_sum(const std::vector<double>& v) { return tree_sum(std::span<const double>(v.data(), v.size())); }

inline double weighted_sum(const Eigen::VectorXd& w, const Eigen::VectorXd& f) {
  Eigen::VectorXd p = w.cwiseProduct(f);
  return tree_sum(p);
}

// First and second derivative weights at x for the three nodes x0, x1, x2.
inline std::array<double, 3> d1_weights(double x, double x0, double x1, double x2) {
  return {((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2)), ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2)),
          ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1))};
}

inline std::array<double, 3> d2_weights(double x0, double x1, double x2) {
  return {2.0 / ((x0 - x1) * (x0 - x2)), 2.0 / ((x1 - x0) * (x1 - x2)), 2.0 / ((x2 - x0) * (x2 - x1))};
}

// 4th-order central second derivative on a uniform periodic grid
inline Eigen::VectorXd periodic_d2(const Eigen::VectorXd& f, double h) {
  const int n = int(f.size());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    auto at = [&](int k) { return f((i + k + 4 * n) % n); };
    out(i) = (-at(-2) + 16 * at(-1) - 30 * at(0) + 16 * at(1) - at(2)) / (12 * h * h);
  }
  return out;
}

inline Eigen::VectorXd periodic_d1(const Eigen::VectorXd& f, double h) {
  const int n = int(f.size());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    auto at = [&](int k) { return f((i + k + 4 * n) % n); };
    out(i) = (at(-2) - 8 * at(-1) + 8 * at(1) - at(2)) / (12 * h);
  }
  return out;
}

// 4th-order second derivative on a uniform grid, values beyond the ends held constant
inline Eigen::VectorXd clamped_d2(const Eigen::VectorXd& f, double h) {
  const int n = int(f.size());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    auto at = [&](int k) { return f(std::clamp(i + k, 0, n - 1)); };
    out(i) = (-at(-2) + 16 * at(-1) - 30 * at(0) + 16 * at(1) - at(2)) / (12 * h * h);
  }
  return out;
}

inline Eigen::VectorXd clamped_d1(const Eigen::VectorXd& f, double h) {
  const int n = int(f.size());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    auto at = [&](int k) { return f(std::clamp(i + k, 0, n - 1)); };
    out(i) = (at(-2) - 8 * at(-1) + 8 * at(1) - at(2)) / (12 * h);
  }
  return out;
}

// log1p / expm1 that also accept forward-mode scalars
inline double log1p_(double x) { return std::log1p(x); }
inline double expm1_(double x) { return std::expm1(x); }

template <class D>
Eigen::AutoDiffScalar<D> log1p_(const Eigen::AutoDiffScalar<D>& x) {
  return Eigen::AutoDiffScalar<D>(std::log1p(x.value()), x.derivatives() / (1.0 + x.value()));
}

template <class D>
Eigen::AutoDiffScalar<D> expm1_(const Eigen::AutoDiffScalar<D>& x) {
  return Eigen::AutoDiffScalar<D>(std::expm1(x.value()), x.derivatives() * std::exp(x.value()));
}

inline double value_of(double x) { return x; }
template <class D>
double value_of(const Eigen::AutoDiffScalar<D>& x) {
  return x.value();
}

}  // namespace kym
