#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kym/forms.hpp"
#include "kym/radial.hpp"

namespace kym {

enum class Geometry { c2_radial, torus, riemann_surface, p1_fubini_study };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

// Sampled Kahler structure. Metric and Ricci components are Hermitian 2x2 matrices
// g_{j kbar}, R_{j kbar} at one representative point per sample (only the (0,0) entry
// is meaningful when n == 1). S is the Riemannian scalar curvature, vol the quadrature
// weights of int f vol_omega.
struct KahlerData {
  Geometry geometry = Geometry::c2_radial;
  int n = 2;
  int genus = 0;
  Eigen::VectorXd coord;
  Eigen::VectorXd phi;
  Eigen::VectorXd p;  // c2_radial: d phi / ds
  std::vector<Eigen::Matrix2cd> metric;
  std::vector<Eigen::Matrix2cd> ricci;
  Eigen::VectorXd scalar;
  Eigen::VectorXd vol;
  std::vector<char> boundary;
  std::optional<RadialGrid> grid;
  double scale = 1;      // omega multiplied by this constant
  double spacing = 0;    // uniform coordinate spacing (torus, P1)

  int size() const { return int(scalar.size()); }
  bool compact() const { return geometry != Geometry::c2_radial; }
  bool interior(int i) const { return boundary.empty() || !boundary[i]; }
  MetricPoint metric_point(int i) const;
  double volume() const;
  double average_scalar() const;
  double scalar_spread() const;  // max - min over interior samples
};

// C^2 radial: phi a function of s = |z|^2 sampled at the grid nodes
KahlerData metric_from_potential_c2(const RadialGrid& grid, const Eigen::VectorXd& phi);
// same, from p = d phi / ds directly; phi reconstructed with phi(r_max) = 0
KahlerData metric_from_slope_c2(const RadialGrid& grid, const Eigen::VectorXd& p);
// Flat torus T^{2n} = (R / 2 pi Z)^{2n}, phi a function of x0 on a uniform periodic grid
KahlerData metric_from_potential_torus(int n, const Eigen::VectorXd& phi);
// P1 in t = log |z|^2 on [-T, T], omega = i ddbar (log(1 + |z|^2) + phi)
KahlerData metric_from_potential_p1(double t_max, const Eigen::VectorXd& phi);
// constant curvature -1 reference of genus >= 2 (phi must vanish)
KahlerData riemann_surface_reference(int genus, const Eigen::VectorXd& phi);

// dispatch on geometry; coord spec: c2 needs a grid
KahlerData metric_from_potential(Geometry geometry, const Eigen::VectorXd& phi, const RadialGrid* grid = nullptr,
                                 int n = 1, double t_max = 30.0, int genus = 2);

// flat C^2 evaluated at `count` arbitrary points
KahlerData flat_c2(int count);

// omega -> c omega on the same samples
KahlerData scaled(const KahlerData& K, double c);

struct ScalarCurvatureReport {
  Eigen::VectorXd S;
  std::optional<double> average;  // compact geometries
};
ScalarCurvatureReport scalar_curvature(const KahlerData& K);

// Closedness defect of the radial Ricci form: rho = i (a delta + b zbar z) dz^dzbar is closed iff b = a_s.
Eigen::VectorXd ricci_closedness_defect(const KahlerData& K);

struct TopologicalConstants {
  double S_hat = 0;
  double c_hat = 0;                 // int (F^F)^omega^{n-2} / Vol; 0 when n < 2 or Vol is infinite
  double c_z = 0;
  double chern_weil_integral = 0;   // int (F^F)^omega^{n-2}, -tr pairing
  double tail_bound = 0;
};

// ff: (F^F)^omega^{n-2} / vol_omega per sample (ignored for n = 1), z2 = |z|^2 in the -tr pairing.
// c_z = alpha0 S_hat + alpha1 (2 c_hat / (n-2)! - 4 |z|^2)
TopologicalConstants topological_constants(const KahlerData& K, const Eigen::VectorXd& ff, double alpha0,
                                           double alpha1, double z2);

// Scalar-valued form fields on 4D samples for the contraction operator.
struct FormField {
  int degree = 2;
  std::vector<RForm> two;
  Eigen::VectorXd four;  // dx0123 coefficients
};

FormField wedge(const std::vector<RForm>& a, const std::vector<RForm>& b);
FormField kahler_form_field(const KahlerData& K);
// power 1 on a 2-form, power 2 on a 4-form; anything else is a degree mismatch
Eigen::VectorXd lambda_contract(const FormField& form, const KahlerData& K, int power);

}  // namespace kym
