#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kym/coupled.hpp"
#include "kym/kahler.hpp"

namespace kym {

using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& q);  // "p/q"
Rational parse_rational(const std::string& s);  // "p/q" or "p"

// Polynomial in k with exact coefficients, c[i] multiplies k^i.
struct RationalPoly {
  static constexpr int kMaxDegree = 8;
  std::vector<Rational> c;

  RationalPoly() = default;
  explicit RationalPoly(std::vector<Rational> coeffs);
  static RationalPoly linear(const Rational& a0, const Rational& a1) { return RationalPoly({a0, a1}); }

  int degree() const { return int(c.size()) - 1; }  // -1 for the zero polynomial
  Rational coeff(int i) const { return i >= 0 && i < int(c.size()) ? c[std::size_t(i)] : Rational(0); }
  Rational leading() const { return c.empty() ? Rational(0) : c.back(); }
  Rational operator()(const Rational& k) const;
  RationalPoly& operator+=(const RationalPoly& o);
  RationalPoly& operator*=(const Rational& s);
  bool operator==(const RationalPoly& o) const { return c == o.c; }

  friend RationalPoly operator+(RationalPoly a, const RationalPoly& b) { return a += b; }
  friend RationalPoly operator-(const RationalPoly& a, const RationalPoly& b) { return a + Rational(-1) * b; }
  friend RationalPoly operator*(const Rational& s, RationalPoly a) { return a *= s; }
  friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) { return multiply(a, b); }

 private:
  static RationalPoly multiply(const RationalPoly& a, const RationalPoly& b);
  void trim();
};

// Split sheaf on P1: E = sum O(a_i)
struct SheafOnP1 {
  std::vector<int> splitting;

  int rank() const { return int(splitting.size()); }
  int degree() const;
  bool degree_zero() const { return degree() == 0; }
  void validate() const;
};

// chi(E(p k)) = sum (p k + a_i + 1) for the polarization O(p)
RationalPoly hilbert_poly(const SheafOnP1& S, int polarization_power = 1);
Rational slope(const SheafOnP1& S, int polarization_power = 1);

struct TestConfig {
  enum class Kind { trivial, product, base_preserving };
  Kind kind = Kind::trivial;
  // base_preserving: nested sub-splitting-types F_1 < ... < F_m < E, weights per graded piece (m + 1)
  std::vector<std::vector<int>> filtration;
  std::vector<long> weights;
  // product: weights of the action on the homogeneous coordinates and on each summand
  std::array<long, 2> base_weights{0, 0};
  std::vector<long> bundle_weights;

  void validate(const SheafOnP1& E) const;  // throws InputError
};
std::string to_string(TestConfig::Kind k);

// weight polynomial of the central fibre of E, and of O_X
RationalPoly weight_polynomial(const SheafOnP1& E, const TestConfig& T, int polarization_power = 1);
RationalPoly base_weight_polynomial(const TestConfig& T, int polarization_power = 1);
// graded pieces of a base-preserving configuration as (sub-splitting, weight)
std::vector<std::pair<SheafOnP1, long>> graded_pieces(const SheafOnP1& E, const TestConfig& T);

struct WeightExpansion {
  Rational F0, F1, F2;
  std::vector<Rational> prefix;  // coefficients of k^0, k^-1, ...
};

// w(k) / (k P(k)) as a series in 1/k
WeightExpansion expansion(const RationalPoly& w, const RationalPoly& P, int terms = 6);
// true when w / (k P) - (F0 + F1 / k + F2 / k^2) = O(k^-3)
bool expansion_remainder_cubic(const RationalPoly& w, const RationalPoly& P, const WeightExpansion& e);

// F_alpha = futaki + alpha * slope_term
struct AlphaInvariant {
  Rational futaki;      // -F1(O)
  Rational slope_term;  // -(F2(E) - F2(O))
  WeightExpansion bundle, base;

  Rational at(const Rational& alpha) const { return futaki + alpha * slope_term; }
  double at(double alpha) const;
};

AlphaInvariant alpha_form(const SheafOnP1& E, const TestConfig& T, int polarization_power = 1);
Rational alpha_invariant(const SheafOnP1& E, const TestConfig& T, const Rational& alpha, int polarization_power = 1);

struct Triple {
  SheafOnP1 bundle;
  int polarization_power = 1;
};

struct ConfigVerdict {
  Rational value;
  Rational futaki;
  Rational slope_term;
  int sign = 0;
  bool product = false;
};

struct Verdict {
  std::vector<ConfigVerdict> configs;
  bool destabilized = false;
  std::optional<std::size_t> witness;  // most negative config
  bool all_zero_products = false;
  std::string label() const;  // over the supplied configurations only
};

Verdict stability_verdict(const Triple& X, const std::vector<TestConfig>& configs, const Rational& alpha);
// every proper nonempty sub-direct-sum with weights (1, 0)
std::vector<TestConfig> subsum_configs(const SheafOnP1& E);

// "-alpha/2" style rendering of futaki + coefficient * alpha
std::string linear_form(const Rational& constant, const Rational& coefficient);

// vector field data on a compact curve: Hamiltonian potential and vertical part per summand
struct FutakiField {
  Eigen::VectorXcd h;
  std::vector<Eigen::Vector2cd> theta;  // skew-Hermitian diagonal; empty means zero
};

// -int (h (a0 S + a1 Lambda^2 (F^F) - c) - 4 a1 (theta, Lambda F)) vol, c from topological_constants
std::complex<double> futaki_character_numeric(const KahlerData& K, const LineBundleData& L, const FutakiField& z,
                                              double alpha0, double alpha1);

struct BridgeReport {
  double alpha = 0;         // r pi^2 alpha1 / alpha0
  double algebraic = 0;
  double numeric = 0;       // -F / (4 vol alpha0) in the normalization of the polarization class
  double absolute = 0;
  double relative = 0;      // absolute / |algebraic|, or absolute when algebraic == 0
  double hamiltonian_mean = 0;  // -int f vol / vol, equals F0(O)
};

struct BridgeOptions {
  double t_max = 30;
  int samples = 2401;
  Eigen::VectorXd phi;                 // Kahler potential perturbation on the t grid (empty: Fubini-Study)
  std::vector<Eigen::VectorXd> chi;    // Hermitian metric perturbations per summand
};

// Smooth vs algebraic invariant on P1 with polarization O(1); E must have degree zero.
BridgeReport bridge_check(const SheafOnP1& E, const TestConfig& T, double alpha0, double alpha1,
                          const BridgeOptions& opt = {});

}  // namespace kym
