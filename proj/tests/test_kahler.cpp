#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "kym/coupled.hpp"
#include "kym/kahler.hpp"

using namespace kym;

namespace {

struct OracleRow {
  double r, S, g11, g22;
};

std::vector<OracleRow> read_oracle(const std::string& name) {
  std::ifstream in(std::string(KYM_ORACLE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  std::vector<OracleRow> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    OracleRow o;
    char c;
    ss >> o.r >> c >> o.S >> c >> o.g11 >> c >> o.g22;
    rows.push_back(o);
  }
  return rows;
}

// four-point Lagrange interpolation in r
double interp(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double t) {
  Eigen::Index k = std::upper_bound(x.data(), x.data() + x.size(), t) - x.data();
  k = std::clamp<Eigen::Index>(k - 2, 0, x.size() - 4);
  double s = 0;
  for (int a = 0; a < 4; ++a) {
    double l = 1;
    for (int b = 0; b < 4; ++b)
      if (b != a) l *= (t - x(k + b)) / (x(k + a) - x(k + b));
    s += l * y(k + a);
  }
  return s;
}

Eigen::VectorXd slope_eps(const RadialGrid& g, double eps) {
  Eigen::VectorXd p(g.size());
  for (int i = 0; i < g.size(); ++i) {
    double s = g.s(i);
    p(i) = eps * (s * s + 2 * s) / ((1 + s) * (1 + s));
  }
  return p;
}

}  // namespace

TEST_CASE("zero potential on C2 gives the Euclidean metric exactly") {
  auto g = RadialGrid::origin(1.0, 50.0, 400);
  auto K = metric_from_potential_c2(g, Eigen::VectorXd::Zero(g.size()));
  for (int i = 0; i < K.size(); ++i) {
    CHECK(K.metric[std::size_t(i)] == Eigen::Matrix2cd::Identity());
    CHECK(K.scalar(i) == 0.0);
  }
}

TEST_CASE("linear potential scales the flat metric") {
  auto g = RadialGrid::origin(1.0, 50.0, 400);
  const double eps = 0.3;
  Eigen::VectorXd phi(g.size());
  for (int i = 0; i < g.size(); ++i) phi(i) = eps * g.s(i);
  auto K = metric_from_potential_c2(g, phi);
  for (int i = 0; i < K.size(); ++i) {
    CHECK(K.metric[std::size_t(i)].determinant().real() == doctest::Approx((1 + eps) * (1 + eps)).epsilon(1e-12));
    CHECK(std::abs(K.scalar(i)) < 1e-8);
  }
}

TEST_CASE("radial metric and scalar curvature against the symbolic oracle, second order") {
  auto rows = read_oracle("scalar_phi_eps_s2_over_1ps.csv");
  double err[2] = {0, 0};
  int n_idx = 0;
  for (int N : {1000, 2000}) {
    auto g = RadialGrid::origin(1.0, 30.0, N);
    auto K = metric_from_slope_c2(g, slope_eps(g, 0.1));
    Eigen::VectorXd g11(N), g22(N);
    for (int i = 0; i < N; ++i) {
      g11(i) = K.metric[std::size_t(i)](0, 0).real();
      g22(i) = K.metric[std::size_t(i)](1, 1).real();
    }
    for (const auto& o : rows) {
      CHECK(interp(g.r, g11, o.r) == doctest::Approx(o.g11).epsilon(1e-5));
      CHECK(interp(g.r, g22, o.r) == doctest::Approx(o.g22).epsilon(1e-6));
      err[n_idx] = std::max(err[n_idx], std::abs(interp(g.r, K.scalar, o.r) - o.S));
    }
    ++n_idx;
  }
  CHECK(err[1] < 1e-3);
  CHECK(std::log2(err[0] / err[1]) > 1.7);
}

TEST_CASE("loss of positivity names the sample") {
  auto g = RadialGrid::origin(1.0, 10.0, 50);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(g.size());
  p(20) = -2;
  try {
    metric_from_slope_c2(g, p);
    FAIL("expected an error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("sample") != std::string::npos);
  }
}

TEST_CASE("flat torus and flat C2 have zero scalar curvature") {
  auto T = metric_from_potential_torus(2, Eigen::VectorXd::Zero(64));
  CHECK(T.scalar.cwiseAbs().maxCoeff() < 1e-8);
  CHECK(T.volume() == doctest::Approx(std::pow(2 * M_PI, 4)));
  auto T1 = metric_from_potential_torus(1, Eigen::VectorXd::Zero(64));
  CHECK(scalar_curvature(T1).average.value() == doctest::Approx(0.0));
}

TEST_CASE("torus scalar curvature averages to zero for any potential") {
  const int N = 256;
  Eigen::VectorXd phi(N);
  for (int i = 0; i < N; ++i) phi(i) = 0.4 * std::sin(2 * M_PI * i / N) + 0.1 * std::cos(6 * M_PI * i / N);
  auto T = metric_from_potential_torus(1, phi);
  CHECK(T.scalar_spread() > 0.01);
  CHECK(std::abs(T.average_scalar()) < 1e-10);
}

TEST_CASE("Fubini-Study P1 has constant scalar curvature equal to its average") {
  auto K = metric_from_potential_p1(30.0, Eigen::VectorXd::Zero(1201));
  CHECK(K.scalar_spread() < 1e-6);
  CHECK(K.volume() == doctest::Approx(M_PI).epsilon(1e-10));
  auto rep = scalar_curvature(K);
  CHECK(rep.average.value() == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(K.scalar(600) == doctest::Approx(8.0).epsilon(1e-6));
}

TEST_CASE("P1 perturbation keeps the average scalar curvature") {
  const int N = 1201;
  auto base = metric_from_potential_p1(30.0, Eigen::VectorXd::Zero(N));
  Eigen::VectorXd phi(N);
  for (int i = 0; i < N; ++i) phi(i) = 0.05 / std::pow(std::cosh(base.coord(i)), 2);
  auto K = metric_from_potential_p1(30.0, phi);
  CHECK(K.scalar_spread() > 0.1);
  CHECK(K.volume() == doctest::Approx(M_PI).epsilon(1e-8));
  CHECK(K.average_scalar() == doctest::Approx(8.0).epsilon(1e-5));
}

TEST_CASE("genus reference has S = -2 and area 4 pi (g - 1)") {
  auto K = riemann_surface_reference(3, Eigen::VectorXd());
  CHECK(K.average_scalar() == doctest::Approx(-2.0));
  CHECK(K.volume() == doctest::Approx(8 * M_PI));
  CHECK_THROWS_AS(riemann_surface_reference(1, Eigen::VectorXd()), InputError);
}

TEST_CASE("contraction normalizations") {
  auto K = flat_c2(1);
  FormField w = kahler_form_field(K);
  CHECK(lambda_contract(w, K, 1)(0) == doctest::Approx(2.0));
  FormField ww = wedge(w.two, w.two);
  // Lambda^2 (omega^omega) = 4 from (n-2)! Lambda^2 (F^F) vol = 2 (F^F)
  CHECK(lambda_contract(ww, K, 2)(0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(lambda_contract(w, K, 2), InputError);
  CHECK_THROWS_AS(lambda_contract(ww, K, 1), InputError);
}

TEST_CASE("Lambda^2 identity on random real 2-forms and metrics") {
  std::mt19937 rng(21);
  std::normal_distribution<double> nd(0, 0.4);
  for (int t = 0; t < 30; ++t) {
    Eigen::Matrix2cd a;
    a << std::complex<double>(nd(rng), nd(rng)), std::complex<double>(nd(rng), nd(rng)),
        std::complex<double>(nd(rng), nd(rng)), std::complex<double>(nd(rng), nd(rng));
    Eigen::Matrix2cd g = Eigen::Matrix2cd::Identity() + a * a.adjoint();
    MetricPoint m = MetricPoint::hermitian(g);
    RForm F;
    for (auto& c : F.c) c = nd(rng);
    // Lambda^2 (F^F) vol = 2 F^F
    double lhs = lambda2_of_coefficient(wedge_coefficient(F, F), m) * m.sqrt_det;
    CHECK(lhs == doctest::Approx(2 * wedge_coefficient(F, F)));
    // Lambda omega = 2 for every metric
    CHECK(lambda(kahler_form(m), m) == doctest::Approx(2.0));
    // real form of i g / 2 dz^dzbar is omega
    RForm w = real_two_form(0.5 * g), w0 = kahler_form(m);
    for (int k = 0; k < 6; ++k) CHECK(w.c[std::size_t(k)] == doctest::Approx(w0.c[std::size_t(k)]).epsilon(1e-12));
  }
}

TEST_CASE("Ricci form of a radial metric is closed to second order") {
  double e[2];
  int idx = 0;
  for (int N : {400, 800}) {
    auto g = RadialGrid::origin(1.0, 20.0, N);
    auto K = metric_from_slope_c2(g, slope_eps(g, 0.2));
    auto d = ricci_closedness_defect(K);
    double m = 0;
    for (int i = 2; i < N - 2; ++i)
      if (g.r(i) > 0.2 && g.r(i) < 10) m = std::max(m, std::abs(d(i)));
    e[idx++] = m;
  }
  CHECK(e[1] < 1e-3);
  CHECK(std::log2(e[0] / e[1]) > 1.7);
}

TEST_CASE("scalar curvature of a pullback by a homothety") {
  auto g = RadialGrid::origin(1.0, 30.0, 600);
  Eigen::VectorXd p = slope_eps(g, 0.1);
  auto K = metric_from_slope_c2(g, p);
  const double c = 3.0;
  // c h^* omega with h(z) = z / sqrt(c): same p on the relabelled grid
  auto K2 = metric_from_slope_c2(g.scaled(std::sqrt(c)), p);
  for (int i = 0; i < g.size() - 1; ++i) CHECK(std::abs(K2.scalar(i) - K.scalar(i) / c) < 1e-10);
  auto K3 = scaled(K, c);
  CHECK(K3.scalar(10) == doctest::Approx(K.scalar(10) / c));
  CHECK(K3.volume() == doctest::Approx(c * c * K.volume()));
}

TEST_CASE("topological constants on the reference geometries") {
  auto T = metric_from_potential_torus(2, Eigen::VectorXd::Zero(32));
  auto t = topological_constants(T, Eigen::VectorXd::Zero(32), 1.0, 0.5, 0.0);
  CHECK(t.S_hat == 0.0);
  CHECK(t.c_hat == 0.0);
  CHECK(t.c_z == 0.0);
  auto P = metric_from_potential_p1(30.0, Eigen::VectorXd::Zero(601));
  auto tp = topological_constants(P, Eigen::VectorXd(), 2.0, 0.7, 0.0);
  CHECK(tp.c_hat == 0.0);
  CHECK(tp.c_z == doctest::Approx(2.0 * 8.0).epsilon(1e-6));
}

TEST_CASE("truncated C2 Chern-Weil integral of the basic instanton") {
  RadialSystem sys;
  sys.grid = RadialGrid::origin(1.0, 100.0, 2000);
  auto P = assemble_radial_pair(sys, 0.0, Eigen::VectorXd::Zero(2000), Eigen::VectorXd::Zero(2000));
  Eigen::VectorXd ff = 0.5 * radial_field_data(P).lambda2_wedge;
  auto t = topological_constants(P.metric, ff, 1.0, 0.1, 0.0);
  // ASD with a positive pairing: F^F = -|F|^2 vol
  CHECK(t.chern_weil_integral == doctest::Approx(-8 * M_PI * M_PI * radial_charge(P)).epsilon(1e-10));
  CHECK(t.chern_weil_integral == doctest::Approx(-8 * M_PI * M_PI).epsilon(1e-4));
  CHECK(t.tail_bound < 1e-5);
  CHECK(t.c_z == 0.0);
}
