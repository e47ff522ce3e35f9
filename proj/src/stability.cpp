#include "kym/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kym {

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q) << "/" << boost::multiprecision::denominator(q);
  return os.str();
}

Rational parse_rational(const std::string& s) {
  try {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
    boost::multiprecision::cpp_int p(s.substr(0, slash)), q(s.substr(slash + 1));
    if (q == 0) throw InputError("zero denominator in '" + s + "'");
    return Rational(p, q);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    throw InputError("not a rational: '" + s + "'");
  }
}

RationalPoly::RationalPoly(std::vector<Rational> coeffs) : c(std::move(coeffs)) { trim(); }

void RationalPoly::trim() {
  while (!c.empty() && c.back() == 0) c.pop_back();
  if (degree() > kMaxDegree) throw InputError("polynomial degree exceeds 8");
}

Rational RationalPoly::operator()(const Rational& k) const {
  Rational v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * k + *it;
  return v;
}

RationalPoly& RationalPoly::operator+=(const RationalPoly& o) {
  if (o.c.size() > c.size()) c.resize(o.c.size(), Rational(0));
  for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
  trim();
  return *this;
}

RationalPoly& RationalPoly::operator*=(const Rational& s) {
  for (auto& x : c) x *= s;
  trim();
  return *this;
}

RationalPoly RationalPoly::multiply(const RationalPoly& a, const RationalPoly& b) {
  if (a.c.empty() || b.c.empty()) return {};
  std::vector<Rational> out(a.c.size() + b.c.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) out[i + j] += a.c[i] * b.c[j];
  return RationalPoly(std::move(out));
}

int SheafOnP1::degree() const {
  int d = 0;
  for (int a : splitting) d += a;
  return d;
}

void SheafOnP1::validate() const {
  if (splitting.empty()) throw InputError("sheaf needs rank >= 1");
}

RationalPoly hilbert_poly(const SheafOnP1& S, int p) {
  S.validate();
  if (p < 1) throw InputError("polarization power must be positive");
  RationalPoly P;
  for (int a : S.splitting) P += RationalPoly::linear(a + 1, p);
  return P;
}

Rational slope(const SheafOnP1& S, int p) {
  RationalPoly P = hilbert_poly(S, p);
  return P.coeff(0) / P.coeff(1);
}

std::string to_string(TestConfig::Kind k) {
  switch (k) {
    case TestConfig::Kind::trivial: return "trivial";
    case TestConfig::Kind::product: return "product";
    case TestConfig::Kind::base_preserving: return "base_preserving";
  }
  return "?";
}

namespace {

// multiset inclusion on sorted copies
bool sub_multiset(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<int> multiset_minus(std::vector<int> b, const std::vector<int>& a) {
  for (int x : a) b.erase(std::find(b.begin(), b.end(), x));
  return b;
}

}  // namespace

void TestConfig::validate(const SheafOnP1& E) const {
  E.validate();
  switch (kind) {
    case Kind::trivial: return;
    case Kind::product:
      if (bundle_weights.size() != E.splitting.size() && !bundle_weights.empty())
        throw InputError("product configuration needs one bundle weight per summand");
      return;
    case Kind::base_preserving: {
      if (filtration.empty()) throw InputError("base-preserving configuration needs a filtration");
      if (weights.size() != filtration.size() + 1) throw InputError("filtration with m steps needs m + 1 weights");
      for (std::size_t j = 0; j < filtration.size(); ++j) {
        const auto& F = filtration[j];
        const auto& next = j + 1 < filtration.size() ? filtration[j + 1] : E.splitting;
        if (F.empty()) throw InputError("filtration step " + std::to_string(j) + " is empty");
        if (F.size() >= next.size() || !sub_multiset(F, next))
          throw InputError("filtration is not nested at step " + std::to_string(j));
      }
      return;
    }
  }
}

std::vector<std::pair<SheafOnP1, long>> graded_pieces(const SheafOnP1& E, const TestConfig& T) {
  T.validate(E);
  if (T.kind != TestConfig::Kind::base_preserving) throw InputError("graded pieces need a base-preserving configuration");
  std::vector<std::pair<SheafOnP1, long>> out;
  std::vector<int> prev;
  for (std::size_t j = 0; j <= T.filtration.size(); ++j) {
    const auto& F = j < T.filtration.size() ? T.filtration[j] : E.splitting;
    out.push_back({SheafOnP1{multiset_minus(F, prev)}, T.weights[j]});
    prev = F;
  }
  return out;
}

RationalPoly weight_polynomial(const SheafOnP1& E, const TestConfig& T, int p) {
  T.validate(E);
  RationalPoly w;
  switch (T.kind) {
    case TestConfig::Kind::trivial: return w;
    case TestConfig::Kind::base_preserving:
      for (const auto& [piece, weight] : graded_pieces(E, T)) w += Rational(weight) * hilbert_poly(piece, p);
      return w;
    case TestConfig::Kind::product: {
      // sections z0^j z1^(D - j) of O(D), D = p k + a, carry u0 j + u1 (D - j) + e
      const Rational u = T.base_weights[0] + T.base_weights[1];
      for (std::size_t i = 0; i < E.splitting.size(); ++i) {
        RationalPoly D = RationalPoly::linear(E.splitting[i], p);
        RationalPoly D1 = RationalPoly::linear(E.splitting[i] + 1, p);
        w += (u / 2) * (D * D1);
        if (!T.bundle_weights.empty()) w += Rational(T.bundle_weights[i]) * D1;
      }
      return w;
    }
  }
  return w;
}

RationalPoly base_weight_polynomial(const TestConfig& T, int p) {
  if (T.kind != TestConfig::Kind::product) return {};
  const Rational u = T.base_weights[0] + T.base_weights[1];
  return (u / 2) * (RationalPoly::linear(0, p) * RationalPoly::linear(1, p));
}

WeightExpansion expansion(const RationalPoly& w, const RationalPoly& P, int terms) {
  if (P.degree() < 0 || P.leading() == 0) throw InputError("Hilbert polynomial has zero leading coefficient");
  const int N = P.degree();
  if (w.degree() > N + 1) throw InputError("weight polynomial degree exceeds deg P + 1");
  terms = std::max(terms, 3);
  // x = 1/k: numerator sum w_i x^(N+1-i), denominator sum p_j x^(N-j)
  std::vector<Rational> num(std::size_t(terms), Rational(0)), den(std::size_t(N + 1), Rational(0));
  for (int i = 0; i <= w.degree(); ++i)
    if (N + 1 - i < terms) num[std::size_t(N + 1 - i)] = w.coeff(i);
  for (int j = 0; j <= N; ++j) den[std::size_t(N - j)] = P.coeff(j);
  WeightExpansion e;
  e.prefix.assign(std::size_t(terms), Rational(0));
  for (int m = 0; m < terms; ++m) {
    Rational v = num[std::size_t(m)];
    for (int j = 1; j <= std::min(m, N); ++j) v -= den[std::size_t(j)] * e.prefix[std::size_t(m - j)];
    e.prefix[std::size_t(m)] = v / den[0];
  }
  e.F0 = e.prefix[0];
  e.F1 = e.prefix[1];
  e.F2 = e.prefix[2];
  return e;
}

bool expansion_remainder_cubic(const RationalPoly& w, const RationalPoly& P, const WeightExpansion& e) {
  // k^2 w - k P (F0 k^2 + F1 k + F2) must have degree <= deg P
  RationalPoly lhs = RationalPoly({0, 0, 1}) * w;
  RationalPoly rhs = RationalPoly({0, 1}) * P * RationalPoly({e.F2, e.F1, e.F0});
  return (lhs - rhs).degree() <= P.degree();
}

double AlphaInvariant::at(double alpha) const {
  return static_cast<double>(futaki) + alpha * static_cast<double>(slope_term);
}

AlphaInvariant alpha_form(const SheafOnP1& E, const TestConfig& T, int p) {
  T.validate(E);
  AlphaInvariant a;
  a.bundle = expansion(weight_polynomial(E, T, p), hilbert_poly(E, p));
  a.base = expansion(base_weight_polynomial(T, p), hilbert_poly(SheafOnP1{{0}}, p));
  a.futaki = -a.base.F1;
  a.slope_term = -(a.bundle.F2 - a.base.F2);
  return a;
}

Rational alpha_invariant(const SheafOnP1& E, const TestConfig& T, const Rational& alpha, int p) {
  if (alpha < 0) throw InputError("alpha must be nonnegative");
  return alpha_form(E, T, p).at(alpha);
}

std::string Verdict::label() const {
  if (destabilized) return "destabilized";
  if (all_zero_products && !configs.empty()) return "semistable over the supplied set, all invariants zero on products";
  return "semistable over the supplied set";
}

Verdict stability_verdict(const Triple& X, const std::vector<TestConfig>& configs, const Rational& alpha) {
  if (alpha < 0) throw InputError("alpha must be nonnegative");
  Verdict v;
  v.all_zero_products = true;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& T = configs[i];
    AlphaInvariant a = alpha_form(X.bundle, T, X.polarization_power);
    ConfigVerdict c;
    c.value = a.at(alpha);
    c.futaki = a.futaki;
    c.slope_term = a.slope_term;
    c.sign = c.value > 0 ? 1 : (c.value < 0 ? -1 : 0);
    // sub-direct-sum filtrations of a split bundle degenerate to E itself
    c.product = T.kind != TestConfig::Kind::trivial;
    if (c.sign < 0 && (!v.witness || c.value < v.configs[*v.witness].value)) v.witness = i;
    if (c.sign != 0 || !c.product) v.all_zero_products = false;
    v.configs.push_back(c);
  }
  v.destabilized = v.witness.has_value();
  return v;
}

std::vector<TestConfig> subsum_configs(const SheafOnP1& E) {
  E.validate();
  const int r = E.rank();
  std::vector<TestConfig> out;
  std::vector<std::vector<int>> seen;
  for (unsigned mask = 1; mask + 1 < (1u << r); ++mask) {
    std::vector<int> F;
    for (int i = 0; i < r; ++i)
      if (mask & (1u << i)) F.push_back(E.splitting[std::size_t(i)]);
    std::sort(F.begin(), F.end());
    if (std::find(seen.begin(), seen.end(), F) != seen.end()) continue;
    seen.push_back(F);
    TestConfig T;
    T.kind = TestConfig::Kind::base_preserving;
    T.filtration = {F};
    T.weights = {1, 0};
    out.push_back(T);
  }
  return out;
}

std::string linear_form(const Rational& constant, const Rational& coefficient) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  std::string out;
  if (constant != 0 || coefficient == 0) out = to_string(constant);
  if (coefficient == 0) return out;
  boost::multiprecision::cpp_int p = numerator(coefficient), q = denominator(coefficient);
  std::string term;
  bool neg = p < 0;
  if (neg) p = -p;
  term = p == 1 ? "alpha" : p.str() + "*alpha";
  if (q != 1) term += "/" + q.str();
  if (out.empty()) return (neg ? "-" : "") + term;
  return out + (neg ? " - " : " + ") + term;
}

std::complex<double> futaki_character_numeric(const KahlerData& K, const LineBundleData& L, const FutakiField& z,
                                              double alpha0, double alpha1) {
  if (!K.compact()) throw InputError("the character needs a compact geometry");
  const int N = K.size();
  if (z.h.size() != N) throw InputError("Hamiltonian samples do not match the metric");
  if (!z.theta.empty() && int(z.theta.size()) != N) throw InputError("vertical samples do not match the metric");
  auto lam = line_bundle_lambda(K, L);
  // curves and one-direction torus data carry no (F^F)
  Eigen::VectorXd ff = Eigen::VectorXd::Zero(N);
  const double c = topological_constants(K, ff, alpha0, alpha1, 0.0).c_z;
  const std::complex<double> I(0, 1);
  Eigen::VectorXcd integrand(N);
  for (int i = 0; i < N; ++i) {
    std::complex<double> pairing = 0;
    if (!z.theta.empty())
      for (std::size_t j = 0; j < L.degrees.size(); ++j)
        pairing -= z.theta[std::size_t(i)](Eigen::Index(j)) * lam[std::size_t(i)](Eigen::Index(j));
    integrand(i) = z.h(i) * (alpha0 * K.scalar(i) + alpha1 * ff(i) - c) - 4.0 * alpha1 * pairing;
  }
  Eigen::VectorXd re = integrand.real(), im = integrand.imag();
  return -std::complex<double>(weighted_sum(K.vol, re), weighted_sum(K.vol, im));
}

BridgeReport bridge_check(const SheafOnP1& E, const TestConfig& T, double alpha0, double alpha1,
                          const BridgeOptions& opt) {
  T.validate(E);
  if (!E.degree_zero()) throw InputError("bridge needs a degree-zero bundle");
  if (E.rank() > 2) throw InputError("bridge realizes rank one and two only");
  if (alpha0 == 0) throw InputError("bridge needs alpha0 != 0");
  const int r = E.rank();
  BridgeReport rep;
  rep.alpha = r * M_PI * M_PI * alpha1 / alpha0;
  AlphaInvariant a = alpha_form(E, T, 1);
  rep.algebraic = a.at(rep.alpha);

  Eigen::VectorXd phi = opt.phi.size() ? opt.phi : Eigen::VectorXd::Zero(opt.samples);
  // omega in the class of O(1): area one
  KahlerData K = scaled(metric_from_potential_p1(opt.t_max, phi), 1.0 / M_PI);
  const int N = K.size();
  LineBundleData L;
  L.degrees = E.splitting;
  if (!opt.chi.empty()) L.chi = opt.chi;
  FutakiField z;
  z.h = Eigen::VectorXcd::Zero(N);
  Eigen::Vector2cd theta = Eigen::Vector2cd::Zero();
  const std::complex<double> I(0, 1);
  switch (T.kind) {
    case TestConfig::Kind::trivial: break;
    case TestConfig::Kind::product: {
      for (int a_i : E.splitting)
        if (a_i != 0) throw InputError("product configurations are realized on the trivial bundle only");
      // f = -(u0 h0 + u1 h1), h1 = d(potential)/dt the moment coordinate
      Eigen::VectorXd phit = clamped_d1(phi, K.spacing);
      for (int i = 0; i < N; ++i) {
        double t = K.coord(i), h1 = 1.0 / (1.0 + std::exp(-t)) + phit(i);
        z.h(i) = -(double(T.base_weights[0]) * (1 - h1) + double(T.base_weights[1]) * h1);
      }
      for (std::size_t j = 0; j < T.bundle_weights.size(); ++j) theta(Eigen::Index(j)) = -0.5 * M_PI * I * double(T.bundle_weights[j]);
      break;
    }
    case TestConfig::Kind::base_preserving: {
      auto pieces = graded_pieces(E, T);
      // weight of each summand of E from its graded piece
      std::vector<int> rest = E.splitting;
      std::vector<long> per(std::size_t(r), 0);
      std::vector<char> used(std::size_t(r), 0);
      for (const auto& [piece, weight] : pieces)
        for (int d : piece.splitting)
          for (int j = 0; j < r; ++j)
            if (!used[std::size_t(j)] && E.splitting[std::size_t(j)] == d) {
              used[std::size_t(j)] = 1;
              per[std::size_t(j)] = weight;
              break;
            }
      for (int j = 0; j < r; ++j) theta(j) = -0.5 * M_PI * I * double(per[std::size_t(j)]);
      break;
    }
  }
  if (T.kind != TestConfig::Kind::trivial) z.theta.assign(std::size_t(N), theta);
  const double vol = K.volume();
  rep.hamiltonian_mean = 0.0 - weighted_sum(K.vol, z.h.real()) / vol;
  std::complex<double> F = futaki_character_numeric(K, L, z, alpha0, alpha1);
  rep.numeric = -F.real() / (4 * vol * alpha0);
  rep.absolute = std::abs(rep.numeric - rep.algebraic);
  rep.relative = rep.algebraic != 0 ? rep.absolute / std::abs(rep.algebraic) : rep.absolute;
  return rep;
}

}  // namespace kym
