#include "doctest.h"

#include <random>

#include "kym/coupled.hpp"
#include "kym/weighted.hpp"

using namespace kym;

namespace {

Eigen::VectorXd power(const Eigen::VectorXd& r, double a) { return r.array().pow(a).matrix(); }

}  // namespace

TEST_CASE("weighted sup norm of constants and power laws") {
  Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(4000, 1.0, 1000.0);
  WeightedNormSpec s;
  s.delta = 0;
  CHECK(weighted_sup_norm(r, Eigen::VectorXd::Ones(4000), s).value == 1.0);
  s.delta = 0.5;
  auto w = weighted_sup_norm(r, power(r, 0.5), s);
  CHECK(!w.growing);
  CHECK(w.value == doctest::Approx(1.0).epsilon(1e-12));
  for (double a : w.annulus_max) CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
  s.delta = 0.4;
  auto g = weighted_sup_norm(r, power(r, 0.5), s);
  CHECK(g.growing);
  CHECK(std::isinf(g.value));
}

TEST_CASE("weighted norm is monotone in the weight") {
  Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(2000, 1.0, 500.0);
  for (double a : {-2.0, -1.0, -0.3}) {
    Eigen::VectorXd phi = power(r, a);
    double prev = INFINITY;
    for (double d = -2.5; d <= 0.01; d += 0.25) {
      WeightedNormSpec s;
      s.delta = d;
      double v = weighted_sup_norm(r, phi, s).value;
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("derivative orders and the Holder estimator scale with the field") {
  Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(3000, 1.0, 300.0);
  WeightedNormSpec s;
  s.delta = -1;
  s.k = 1;
  auto a = weighted_sup_norm(r, power(r, -1), s);
  CHECK(a.value == doctest::Approx(1.0).epsilon(1e-2));
  auto b = weighted_sup_norm(r, 3.0 * power(r, -1), s);
  CHECK(b.holder == doctest::Approx(3 * a.holder));
  s.beta = 1.5;
  CHECK_THROWS_AS(weighted_sup_norm(r, r, s), InputError);
  s.beta = 0.5;
  s.r0 = 0.5;
  CHECK_THROWS_AS(weighted_sup_norm(r, r, s), InputError);
}

TEST_CASE("basic instanton potential decays like 1/r") {
  std::mt19937 rng(1);
  std::normal_distribution<double> nd(0, 1);
  std::vector<Quatd> pts;
  for (int i = 0; i < 3000; ++i) {
    Quatd d{nd(rng), nd(rng), nd(rng), nd(rng)};
    double R = std::exp(std::log(200.0) * i / 2999.0);
    pts.push_back(d * (R / std::sqrt(d.norm2())));
  }
  auto A = sample_basic(pts);
  WeightedNormSpec s;
  s.delta = -1;
  auto w = weighted_sup_norm(A, s);
  CHECK(std::isfinite(w.value));
  // |A_mu| <= r / (1 + r^2), so r |A| < 1
  CHECK(w.value < 1.0);
  CHECK(w.value > 0.9);
  CHECK(certify_decay(A));
  CHECK(*A.decay_certificate == w.value);
  // a field decaying only like r^-3/4 is not certified
  auto B = A;
  for (std::size_t i = 0; i < B.size(); ++i)
    for (auto& q : B.values[i]) q = q * std::sqrt(std::sqrt(B.points[i].norm2()));
  B.decay_certificate.reset();
  CHECK(!certify_decay(B));
}

TEST_CASE("indicial roots") {
  auto r = indicial_roots({3.0, 0.0});
  CHECK(r[0].first == 0.0);
  CHECK(r[0].second == -2.0);
  CHECK(r[1].first == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r[1].second == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK_THROWS_AS(indicial_roots({-0.1}), InputError);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.5 * i);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto [up, lo] = indicial_roots({grid[i]})[0];
    CHECK(std::abs(up + lo + 2) <= 1e-12);
    CHECK(std::abs(up * lo + grid[i]) <= 1e-12);
    CHECK(!(up > -2 + 1e-12 && up < -1e-12));
    CHECK(!(lo > -2 + 1e-12 && lo < -1e-12));
  }
}

TEST_CASE("sphere spectrum table is l (l + 2)") {
  auto t = sphere_spectrum_table(5, 800);
  for (int l = 0; l < 5; ++l) CHECK(t[std::size_t(l)] == doctest::Approx(l * (l + 2)).epsilon(1e-4).scale(1));
}

TEST_CASE("plain radial Laplacian on r^2") {
  auto g = RadialGrid::origin(1.0, 5.0, 400);
  InstantonProfile flat{InstantonProfile::Kind::flat, 1.0};
  auto L = assemble_radial_laplacian(g, 0.0, flat);
  CHECK(L.V.cwiseAbs().maxCoeff() == 0.0);
  Eigen::VectorXd u = g.r.cwiseProduct(g.r);
  Eigen::VectorXd Lu = L.apply(u);
  double err = 0;
  for (int i = 1; i < 399; ++i) err = std::max(err, std::abs(Lu(i) + 8));
  CHECK(err < 1e-2);
}

TEST_CASE("radial operator is symmetric for r^3 dr to second order") {
  double e[2];
  int idx = 0;
  for (int n : {400, 800}) {
    auto g = RadialGrid::annulus(0.5, 6.0, n);
    auto L = assemble_radial_laplacian(g, 3.0, InstantonProfile{});
    Eigen::VectorXd u(n), v(n), w(n);
    for (int i = 0; i < n; ++i) {
      double r = g.r(i);
      u(i) = std::sin(M_PI * (r - 0.5) / 5.5) * std::exp(-r);
      v(i) = std::sin(2 * M_PI * (r - 0.5) / 5.5) / (1 + r * r);
      // trapezoid in r for r^3 dr
      double a = i > 0 ? g.r(i) - g.r(i - 1) : 0, b = i < n - 1 ? g.r(i + 1) - g.r(i) : 0;
      w(i) = 0.5 * (a + b) * r * r * r;
    }
    Eigen::VectorXd Lu = L.apply(u), Lv = L.apply(v);
    double luv = 0, ulv = 0;
    for (int i = 1; i < n - 1; ++i) {
      luv += w(i) * Lu(i) * v(i);
      ulv += w(i) * u(i) * Lv(i);
    }
    e[idx++] = std::abs(luv - ulv) / std::abs(luv);
    // exact symmetry for the cell volumes
    double a1 = 0, a2 = 0;
    for (int i = 1; i < n - 1; ++i) {
      a1 += L.W(i) * Lu(i) * v(i);
      a2 += L.W(i) * u(i) * Lv(i);
    }
    CHECK(a1 == doctest::Approx(a2).epsilon(1e-12));
  }
  CHECK(e[0] < 1e-4);
  CHECK(e[1] < 1e-4);
}

TEST_CASE("lowest Dirichlet eigenvalue of the unit ball converges at second order") {
  // radial modes J_1(k r) / r vanish at the first zero of J_1
  const double j11 = 3.8317059702075125, exact = j11 * j11;
  double e[3];
  int idx = 0;
  for (int n : {100, 200, 400}) {
    auto g = RadialGrid::origin(1.0, 1.0, n);
    auto L = assemble_radial_laplacian(g, 0.0, InstantonProfile{InstantonProfile::Kind::flat, 1.0});
    e[idx++] = std::abs(L.lowest_eigenvalue() - exact);
  }
  CHECK(e[2] < 1e-2);
  CHECK(std::log2(e[0] / e[1]) > 1.8);
  CHECK(std::log2(e[1] / e[2]) > 1.8);
}

TEST_CASE("decaying kernel is trivial in every tested sector") {
  auto g = RadialGrid::origin(1.0, 200.0, 600);
  for (double l : {0.0, 3.0, 8.0, 15.0})
    for (auto kind : {InstantonProfile::Kind::flat, InstantonProfile::Kind::instanton}) {
      auto L = assemble_radial_laplacian(g, l, InstantonProfile{kind, 1.0});
      CHECK(L.lowest_eigenvalue() > 0);
    }
}

TEST_CASE("connection block of the linearization is minus half the instanton operator") {
  double e[2];
  int idx = 0;
  for (int n : {800, 1600}) {
    auto g = RadialGrid::origin(1.0, 20.0, n);
    Eigen::VectorXd df(n);
    for (int i = 0; i < n; ++i) df(i) = std::exp(-g.s(i) / 4) * (1 + g.s(i));
    Eigen::VectorXd lin = linearization_apply(g, SeedProfile{}, Eigen::VectorXd::Zero(n), df);
    auto L = assemble_radial_laplacian(g, 0.0, InstantonProfile{});
    Eigen::VectorXd Lf = L.apply(df);
    double m = 0;
    for (int i = 0; i < n - 1; ++i)
      if (g.r(i) > 0.2 && g.r(i) < 8) m = std::max(m, std::abs(lin(2 * i + 1) + 0.5 * Lf(i)));
    e[idx++] = m;
  }
  CHECK(e[1] < 1e-3);
  CHECK(std::log2(e[0] / e[1]) > 1.7);
}

TEST_CASE("decay probes recover the lower indicial root") {
  auto g = RadialGrid::origin(0.05, 2000.0, 3000);
  SUBCASE("flat Green's function") {
    auto L = assemble_radial_laplacian(g, 0.0, InstantonProfile{InstantonProfile::Kind::flat, 1.0});
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(g.size());
    for (int i = 0; i < g.size() && g.r(i) < 0.1; ++i) rhs(i) = 1;
    auto p = decay_probe(L, rhs);
    CHECK(!p.flagged);
    CHECK(p.exponent == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(std::abs(p.exponent + 2) < 0.1);
  }
  SUBCASE("instanton sectors") {
    for (double l : {0.0, 3.0, 8.0}) {
      auto L = assemble_radial_laplacian(g, l, InstantonProfile{});
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(g.size());
      for (int i = 0; i < g.size() && g.r(i) < 2; ++i) rhs(i) = std::exp(-g.s(i));
      auto p = decay_probe(L, rhs);
      double predicted = indicial_roots({l})[0].second;
      CHECK(std::abs(p.exponent - predicted) < 0.15);
    }
  }
  SUBCASE("zero right-hand side") {
    auto L = assemble_radial_laplacian(g, 3.0, InstantonProfile{});
    CHECK(decay_probe(L, Eigen::VectorXd::Zero(g.size())).trivial);
  }
  SUBCASE("support too close to the far boundary") {
    auto L = assemble_radial_laplacian(g, 3.0, InstantonProfile{});
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(g.size());
    rhs(g.size() - 5) = 1;
    CHECK_THROWS_AS(decay_probe(L, rhs), InputError);
  }
}

TEST_CASE("perturbed fields need a decay certificate for the charge") {
  CartesianGrid4 grid;
  grid.n = 12;
  grid.h = 2.0;
  grid.origin = Eigen::Vector4d::Constant(-11.0);
  auto A = sample_on_grid(grid, Provenance::perturbed, [](const Quatd& x) { return basic_instanton(x); });
  CHECK_THROWS_AS(instanton_number(A), InputError);
  CHECK(certify_decay(A, 2.0));
  CHECK_NOTHROW(instanton_number(A));
}
