#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kym/gauge.hpp"
#include "kym/kahler.hpp"
#include "kym/radial.hpp"

namespace kym {

struct CouplingConstants {
  double alpha0 = 1;
  double alpha1 = 0;

  double ratio() const { return alpha1 / alpha0; }
  bool kahler() const { return alpha0 != 0 && ratio() > 0; }
  void validate_continuation() const {
    if (alpha0 == 0) throw InputError("continuation needs alpha0 != 0");
  }
  // the radial operator S + alpha *tr(F^F) corresponds to alpha0 = 1, alpha1 = -alpha / 2
  static CouplingConstants from_radial(double alpha) { return {1.0, -0.5 * alpha}; }
  double radial_alpha() const { return -2.0 * alpha1 / alpha0; }
};

// Constant on the right of the scalar equation of the radial operator.
enum class ConstantConvention { decaying, literal };  // 0, or alpha 8 pi^2 k
std::string to_string(ConstantConvention c);
double radial_constant(ConstantConvention c, double alpha, int k);

// Hermitian metric H = H_seed exp(f (P - P^perp)) on the tautological splitting of C^2.
struct RadialConnection {
  SeedProfile seed;
  Eigen::VectorXd f;
};

// Direct sum of line bundles of degrees d_j on a curve, hermitian metrics h_j = h_j^0 exp(-chi_j).
struct LineBundleData {
  std::vector<int> degrees;
  std::vector<Eigen::VectorXd> chi;  // empty: chi = 0
};

struct SolutionPair {
  KahlerData metric;
  std::optional<RadialConnection> radial;
  std::optional<LineBundleData> bundle;
  std::optional<CurvatureField> field;
  CouplingConstants coupling;
  int charge = 0;
  double alpha = 0;  // radial operator parameter
  ConstantConvention constant = ConstantConvention::decaying;
  double residual_hermitian = NAN;
  double residual_scalar = NAN;
  int newton_iterations = 0;
};

struct ResidualPair {
  std::vector<Eigen::Matrix2cd> hermitian;  // Lambda F - z
  Eigen::VectorXd scalar;                   // alpha0 S + alpha1 Lambda^2 (F^F) - c
  std::vector<char> interior;

  double hermitian_norm() const;  // max over interior samples
  double scalar_norm() const;
};

// F of the radial pair at node i, unitary frame at (r_i, 0)
template <class T>
RadialCurvature<double> radial_curvature_value(const RadialCurvature<T>& c) {
  return {value_of(c.A1), value_of(c.A2), value_of(c.B)};
}
QForm radial_curvature_form(const RadialCurvature<double>& c);
RadialCurvature<double> radial_curvature_at(const RadialGrid& g, const SeedProfile& seed, const Eigen::VectorXd& f,
                                            int i);

// Lambda F of a split line bundle on a curve, diagonal entries per sample
std::vector<Eigen::Vector2cd> line_bundle_lambda(const KahlerData& K, const LineBundleData& L);
// z_j = -2 pi i d_j / Vol
Eigen::Matrix2cd matched_center(const KahlerData& K, const LineBundleData& L);

ResidualPair coupled_residual(const SolutionPair& P, const Eigen::Matrix2cd& z, double c);

// Rows of the radial operator. Unknown layout: p (= d phi / ds) and f on the grid nodes.
// out[2i] = S + alpha T - c, out[2i+1] = ell (Lambda F = ell * i) for i < n-1;
// out[2n-2], out[2n-1]: decay rows (s p)_s = 0, (s f)_s = 0 scaled by ds / s.
template <class T>
void c2_rows(const RadialGrid& g, const SeedProfile& seed, double alpha, double c, const T* p, const T* f, T* out) {
  const int n = g.size();
  auto jets = radial_metric_jets(g, p);
  for (int i = 0; i < n; ++i)
    if (!(value_of(jets.g1[i]) > 0) || !(value_of(jets.g2[i]) > 0))
      throw NumericalError("metric loses positivity at sample " + std::to_string(i));
  for (int i = 0; i < n - 1; ++i) {
    T S = radial_scalar_curvature(g, p, jets, i);
    auto cur = radial_curvature(g, seed, f, i);
    out[2 * i] = S + alpha * radial_trace_density(cur, jets.g1[i], jets.g2[i]) - c;
    out[2 * i + 1] = radial_lambda_coefficient(cur, jets.g1[i], jets.g2[i]);
  }
  auto w = d1_weights(g.s(n - 1), g.s(n - 3), g.s(n - 2), g.s(n - 1));
  const double scale = (g.s(n - 1) - g.s(n - 2)) / g.s(n - 1);
  auto decay = [&](const T* v) {
    T d = w[0] * g.s(n - 3) * v[n - 3] + w[1] * g.s(n - 2) * v[n - 2] + w[2] * g.s(n - 1) * v[n - 1];
    return T(d * scale);
  };
  out[2 * n - 2] = decay(p);
  out[2 * n - 1] = decay(f);
}

struct C2Residual {
  Eigen::VectorXd scalar;  // nodes 0..n-2
  Eigen::VectorXd lambda;  // ell, the su(2) field is ell * i
  double decay_p = 0, decay_f = 0;

  double scalar_norm() const { return scalar.cwiseAbs().maxCoeff(); }
  double hermitian_norm() const { return lambda.cwiseAbs().maxCoeff(); }
  std::vector<Quatd> su2() const;
};

C2Residual c2_residual(const RadialGrid& g, const SeedProfile& seed, double alpha, int k, const Eigen::VectorXd& p,
                       const Eigen::VectorXd& f, ConstantConvention cc = ConstantConvention::decaying);

// dL at (alpha, phi, f) = (0, 0, 0) applied to (dp, df); same row layout as c2_rows
Eigen::VectorXd linearization_apply(const RadialGrid& g, const SeedProfile& seed, const Eigen::VectorXd& dp,
                                    const Eigen::VectorXd& df);
// dense matrix of the linearization in the variables (phi, f), p = d phi / ds
Eigen::MatrixXd linearization_matrix_phi(const RadialGrid& g, const SeedProfile& seed);

// Sparse Jacobian of c2_rows by one forward-mode pass (10 colours cover the band).
struct RadialSystem {
  RadialGrid grid;
  SeedProfile seed;
  int k = 1;
  ConstantConvention constant = ConstantConvention::decaying;

  int unknowns() const { return 2 * grid.size(); }
  Eigen::VectorXd residual(double alpha, const Eigen::VectorXd& x) const;
  Eigen::VectorXd residual_and_jacobian(double alpha, const Eigen::VectorXd& x, Eigen::SparseMatrix<double>& J) const;
  static Eigen::VectorXd interleave(const Eigen::VectorXd& p, const Eigen::VectorXd& f);
  static void split(const Eigen::VectorXd& x, Eigen::VectorXd& p, Eigen::VectorXd& f);
};

struct NewtonOptions {
  double tol = 1e-8;
  int max_iterations = 50;
  int max_halvings = 12;
};

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;  // max-norm of the residual per iterate
  double residual_scalar = NAN, residual_hermitian = NAN;
  std::string diagnostic;
};

NewtonReport newton_solve(const RadialSystem& sys, double alpha, Eigen::VectorXd& x, const NewtonOptions& opt = {});

SolutionPair assemble_radial_pair(const RadialSystem& sys, double alpha, const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& f, int newton_iterations = 0);
RadialSystem radial_system_of(const SolutionPair& P);

struct ContinuationOptions {
  double alpha_target = 0;
  double initial_step = 0.02;
  double min_step = 1e-5;
  int max_steps = 400;
  NewtonOptions newton;
};

struct ContinuationRecord {
  double alpha = 0;
  int newton_iterations = 0;
  double residual_scalar = 0, residual_hermitian = 0;
  double scalar_spread = 0;
  bool accepted = false;
  std::vector<double> history;
};

struct ContinuationResult {
  std::vector<SolutionPair> path;  // accepted pairs, seed first
  std::vector<ContinuationRecord> log;
  bool reached_target = false;
  std::string diagnostic;
};

ContinuationResult newton_continuation(const RadialSystem& sys, const ContinuationOptions& opt);

// homothety: coupling alpha -> beta = c alpha, omega -> c h^* omega with h(z) = z / sqrt(c)
SolutionPair rescale_solution(const SolutionPair& P, double beta);
// cubic spline in s onto another grid, decay law p, f ~ 1/s beyond the old range
SolutionPair resample(const SolutionPair& P, const RadialGrid& grid);

// instanton number of the radial pair, int *tr(F^F) vol / 8 pi^2
double radial_charge(const SolutionPair& P);
// -tr pointwise data of the radial pair at interior nodes
struct RadialFieldData {
  Eigen::VectorXd F2, lambdaF2, F02, lambda2_wedge;
};
RadialFieldData radial_field_data(const SolutionPair& P);

struct CymReport {
  double value = 0;
  double first = 0;     // || alpha0 S - 2 alpha1 |F|^2 - c ||^2
  double lambda = 0;    // 2 alpha1 (1 - 2c) ||Lambda F||^2
  double f02 = 0;       // 2 alpha1 (1 - 2c) 4 ||F^{0,2}||^2
  double constant = 0;  // (2 c alpha0 Shat - c^2) Vol + 2 alpha1 (1 - 2c) top
  double topological = 0;  // ||F||^2 - ||Lambda F||^2 - 4 ||F^{0,2}||^2
  double tail_bound = 0;
  bool flagged = false;  // 2c >= 1
  double decomposition_sum() const { return first + lambda + f02 + constant; }
};

CymReport cym_functional(const SolutionPair& P, double c);

struct DecoupledCheck {
  Eigen::VectorXd hermitian;  // max_j |Lambda F_j - z_j| per sample
  Eigen::VectorXd scalar;     // S - Shat
  double agreement = 0;       // max difference to coupled_residual over the supplied couplings
};
DecoupledCheck riemann_surface_decoupled_check(const KahlerData& K, const LineBundleData& L,
                                               const std::vector<CouplingConstants>& couplings = {});

// alpha0 (rho - c' omega) - alpha1 (2 (Lambda F, F) - Lambda(F^F) - c'' omega)
std::vector<RForm> eym_residual(const KahlerData& K, const CurvatureField& F, double alpha0, double alpha1,
                                double c1, double c2);
// 2 (Lambda F, F) - Lambda (F^F) - |F|^2 omega, vanishes for ASD F
std::vector<RForm> eym_reduction_defect(const KahlerData& K, const CurvatureField& F);
// real 2-form of i H_{j kbar} dz_j ^ dzbar_k
RForm real_two_form(const Eigen::Matrix2cd& H);

}  // namespace kym
