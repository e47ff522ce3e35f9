#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>

#include "kym/forms.hpp"
#include "kym/kahler.hpp"
#include "kym/quaternion.hpp"

namespace kym {

using OneFormValue = std::array<Quatd, 4>;

// A = Im(conj(x) dx) / (1 + |x|^2)
template <class T>
std::array<Quat<T>, 4> basic_potential(const Quat<T>& x) {
  T d = T(1) + x.norm2();
  std::array<Quat<T>, 4> A;
  for (int mu = 0; mu < 4; ++mu) A[mu] = (x.conj() * Quat<T>::unit(mu)).imag() / d;
  return A;
}

OneFormValue basic_instanton(const Quatd& x);

struct InstantonSpec {
  std::vector<Quatd> centers;
  std::vector<double> scales;

  int charge() const { return int(centers.size()); }
  void validate() const;  // throws InputError
};

struct PoleError : NumericalError {
  using NumericalError::NumericalError;
};

// Charge one: u = (x - b) lambda. Charge k >= 2: u_j = lambda_j (x - b_j)^{-1}, A = Im(u* du) / (1 + |u|^2).
template <class T>
std::array<Quat<T>, 4> thooft_potential(const InstantonSpec& spec, const Quat<T>& x) {
  std::array<Quat<T>, 4> A{};
  const int k = spec.charge();
  if (k == 1) {
    Quat<T> y = x - Quat<T>::from(spec.centers[0]);
    T l2 = T(spec.scales[0] * spec.scales[0]);
    T d = T(1) + l2 * y.norm2();
    for (int mu = 0; mu < 4; ++mu) A[mu] = (y.conj() * Quat<T>::unit(mu)).imag() * T(l2 / d);
    return A;
  }
  T u2 = T(0);
  for (int j = 0; j < k; ++j) {
    Quat<T> y = x - Quat<T>::from(spec.centers[std::size_t(j)]);
    T n2 = y.norm2();
    if (value_of(n2) == 0.0) throw PoleError("sample coincides with a pole of the singular gauge");
    Quat<T> yi = y.inverse();
    T l2 = T(spec.scales[std::size_t(j)] * spec.scales[std::size_t(j)]);
    u2 += l2 / n2;
    // conj(u_j) du_j = -l^2 conj(y^{-1}) y^{-1} dy y^{-1}
    Quat<T> left = yi.conj() * yi;
    for (int mu = 0; mu < 4; ++mu) A[mu] -= (left * Quat<T>::unit(mu) * yi) * l2;
  }
  T d = T(1) + u2;
  for (int mu = 0; mu < 4; ++mu) A[mu] = A[mu].imag() / d;
  return A;
}

OneFormValue thooft_instanton(const InstantonSpec& spec, const Quatd& x);

enum class Provenance { analytic_basic, thooft, perturbed, flat };
std::string to_string(Provenance p);

// Uniform Cartesian grid in R^4: origin + h * (i0, i1, i2, i3), 0 <= i < n.
struct CartesianGrid4 {
  Eigen::Vector4d origin = Eigen::Vector4d::Zero();
  double h = 0.1;
  int n = 8;

  int count() const { return n * n * n * n; }
  std::array<int, 4> index(int flat) const;
  int flat(const std::array<int, 4>& idx) const;
  Quatd point(int flat) const;
};

struct ConnectionField {
  std::vector<Quatd> points;
  std::vector<OneFormValue> values;
  Provenance provenance = Provenance::flat;
  std::optional<InstantonSpec> spec;
  std::optional<CartesianGrid4> grid;
  std::vector<int> sample_errors;  // indices evaluated at a pole
  // sup r |A| over the samples, set by the caller after a weighted-norm check
  std::optional<double> decay_certificate;

  std::size_t size() const { return points.size(); }
};

ConnectionField sample_basic(const std::vector<Quatd>& points);
ConnectionField sample_thooft(const InstantonSpec& spec, const std::vector<Quatd>& points);
ConnectionField sample_flat(const std::vector<Quatd>& points);
ConnectionField sample_on_grid(const CartesianGrid4& grid, Provenance provenance,
                               const std::function<OneFormValue(const Quatd&)>& potential);

struct CurvatureField {
  enum class Derivation { analytic, finite_difference };
  std::vector<Quatd> points;
  std::vector<QForm> values;
  Derivation derivation = Derivation::analytic;
  std::vector<char> boundary;  // one-sided stencil used
  std::vector<char> valid;     // false at pole samples

  std::size_t size() const { return values.size(); }
  bool interior(std::size_t i) const { return (boundary.empty() || !boundary[i]) && (valid.empty() || valid[i]); }
};

// F = dA + A^A from an analytic potential, by forward-mode differentiation
template <class Potential>
QForm curvature_of(const Potential& potential, const Quatd& x) {
  using AD = Eigen::AutoDiffScalar<Eigen::Vector4d>;
  Quat<AD> xa;
  for (int mu = 0; mu < 4; ++mu) xa[mu] = AD(x[mu], 4, mu);
  std::array<Quat<AD>, 4> A = potential(xa);
  std::array<Quatd, 4> a;
  std::array<std::array<Quatd, 4>, 4> dA;  // dA[mu][nu] = d_mu A_nu
  for (int nu = 0; nu < 4; ++nu)
    for (int c = 0; c < 4; ++c) {
      a[nu][c] = A[nu][c].value();
      for (int mu = 0; mu < 4; ++mu) dA[mu][nu][c] = A[nu][c].derivatives()(mu);
    }
  QForm F;
  for (int k = 0; k < 6; ++k) {
    int mu = kPairs[k][0], nu = kPairs[k][1];
    F.c[k] = dA[mu][nu] - dA[nu][mu] + commutator(a[mu], a[nu]);
  }
  return F;
}

// dxbar ^ dx / (1 + |x|^2)^2
QForm basic_curvature(const Quatd& x);

CurvatureField curvature(const ConnectionField& A);

// |F^+|_omega per sample (-tr norm); metric may hold one sample, broadcast to all
Eigen::VectorXd asd_residual(const CurvatureField& F, const KahlerData& metric);

// coefficient of tr(F^F) against dx0123
Eigen::VectorXd chern_weil_density(const CurvatureField& F);
double chern_weil_density(const QForm& F);

struct ChargeOptions {
  double rel_tol = 1e-3;
  int radial_panels = 24;
  int radial_order = 16;
  int polar_nodes = 24;
  int azimuth_nodes = 24;
};

struct ChargeEstimate {
  double k = 0;            // integral / 8 pi^2
  double tail_bound = 0;   // bound on the neglected part, in units of k
  double radius = 0;
  double tail_constant = 0;
};

// Ball quadrature of the density of an analytic spec (radial rule for one center).
ChargeEstimate instanton_number(const InstantonSpec& spec, const ChargeOptions& opt = {});
ChargeEstimate instanton_number(const ConnectionField& A, const ChargeOptions& opt = {});

// least squares of log |F|^2 against {1, log(1 + l^2 |x - b|^2)} at interior samples
struct DensityFit {
  double amplitude = 0;  // exp of the constant coefficient
  double exponent = 0;
  double residual = 0;   // max |fit - |F|^2| / max |F|^2
  int samples = 0;
};
DensityFit density_shape_fit(const CurvatureField& F, const Quatd& center = {}, double scale = 1.0);

// Gauss-Legendre nodes and weights on [a, b]
void gauss_legendre(int order, double a, double b, std::vector<double>& x, std::vector<double>& w);

}  // namespace kym
