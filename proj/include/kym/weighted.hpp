#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kym/gauge.hpp"
#include "kym/radial.hpp"

namespace kym {

struct WeightedNormSpec {
  double delta = 0;
  double r0 = 1;
  int k = 0;          // derivative order
  double beta = 0.5;  // Holder exponent

  void validate() const;
};

struct WeightedNorm {
  double value = 0;                  // +inf when flagged
  bool growing = false;             // power growth faster than r^0.02 over the outer annuli
  std::vector<double> annulus_max;   // r^-delta sup per dyadic annulus [r0 2^j, r0 2^{j+1})
  double holder = 0;                 // estimator of the beta seminorm part
};

// radial samples (r_i increasing, |phi| or a pointwise norm per sample)
WeightedNorm weighted_sup_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& phi, const WeightedNormSpec& spec);
// sup-norm of the potential coefficients of a sampled connection, r = |x|
WeightedNorm weighted_sup_norm(const ConnectionField& A, const WeightedNormSpec& spec);
// sets A.decay_certificate from the delta = -1 norm when finite; returns it
bool certify_decay(ConnectionField& A, double r0 = 1.0);

// (delta+, delta-) = -1 +- sqrt(1 + lambda), sorted by lambda
std::vector<std::pair<double, double>> indicial_roots(std::vector<double> eigenvalues);

// Low part of the spectrum of the twisted Laplacian on S^3 from the zonal
// operator -(sin^-2 chi)(sin^2 chi u')' on n cells.
std::vector<double> sphere_spectrum_table(int count, int n = 400);

struct InstantonProfile {
  enum class Kind { flat, instanton };
  Kind kind = Kind::instanton;
  double scale = 1;  // t(r) = r^2 / (scale^2 + r^2)

  double t(double r) const { return kind == Kind::flat ? 0.0 : r * r / (scale * scale + r * r); }
};

// -u'' - (3/r) u' + V u in flux form, V = (lambda + 8 (1 - t)^2) / r^2 (instanton) or lambda / r^2 (flat).
struct RadialOperator {
  enum class Inner { regular, dirichlet };
  RadialGrid grid;
  double lambda = 0;
  InstantonProfile profile;
  Inner inner = Inner::regular;  // outer boundary: homogeneous Dirichlet at the last node
  Eigen::VectorXd V;
  Eigen::VectorXd W;             // cell volumes, int u r^3 dr ~ sum W u
  Eigen::VectorXd lower, diag, upper;

  int size() const { return int(diag.size()); }
  bool fixed(int i) const { return i == size() - 1 || (inner == Inner::dirichlet && i == 0); }
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;  // rhs at fixed nodes is the boundary value
  // lowest eigenvalue with Dirichlet conditions, dense symmetric solve
  double lowest_eigenvalue() const;
};

RadialOperator assemble_radial_laplacian(const RadialGrid& grid, double lambda, const InstantonProfile& profile);

struct DecayProbe {
  double exponent = 0;
  double fit_residual = 0;
  double window_lo = 0, window_hi = 0;
  bool trivial = false;
  bool flagged = false;
};

// Solve L u = rhs with Dirichlet 0 at r_max and fit log|u| against log r on the outer
// third (in log r) of [support, r_max / 10].
DecayProbe decay_probe(const RadialOperator& op, const Eigen::VectorXd& rhs, double max_residual = 0.05);

}  // namespace kym
