#include "doctest.h"

#include <random>

#include "kym/gauge.hpp"

using namespace kym;

namespace {

Quatd random_quat(std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng), n(rng), n(rng)};
}

QForm random_qform(std::mt19937& rng) {
  QForm F;
  for (auto& c : F.c) c = random_quat(rng).imag();
  return F;
}

Eigen::Matrix2cd random_hermitian_metric(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 0.4);
  Eigen::Matrix2cd a;
  a << std::complex<double>(n(rng), n(rng)), std::complex<double>(n(rng), n(rng)),
      std::complex<double>(n(rng), n(rng)), std::complex<double>(n(rng), n(rng));
  return Eigen::Matrix2cd::Identity() + a * a.adjoint();
}

// -1/2 box^2 log(1 + sum l^2 / |x - b|^2), nested second differences
double thooft_oracle_density(const InstantonSpec& spec, const Quatd& x, double h = 1e-2) {
  auto logrho = [&](const Quatd& y) {
    double r = 1;
    for (std::size_t j = 0; j < spec.centers.size(); ++j)
      r += spec.scales[j] * spec.scales[j] / (y - spec.centers[j]).norm2();
    return std::log(r);
  };
  auto lap = [&](auto&& f, const Quatd& y) {
    double s = 0;
    for (int mu = 0; mu < 4; ++mu) {
      Quatd e = Quatd::unit(mu) * h;
      s += f(y + e) - 2 * f(y) + f(y - e);
    }
    return s / (h * h);
  };
  auto lap1 = [&](const Quatd& y) { return lap(logrho, y); };
  return -0.5 * lap(lap1, x);
}

}  // namespace

TEST_CASE("matrix embedding is an algebra homomorphism") {
  std::mt19937 rng(1);
  for (int t = 0; t < 50; ++t) {
    Quatd p = random_quat(rng), q = random_quat(rng);
    CHECK((to_matrix(p * q) - to_matrix(p) * to_matrix(q)).norm() < 1e-12);
    CHECK((to_matrix(p.conj()) - to_matrix(p).adjoint()).norm() < 1e-12);
    CHECK(std::abs(pair(p, q) + (to_matrix(p.imag()) * to_matrix(q.imag())).trace().real() -
                   2 * p.w * q.w) < 1e-12);
    Quatd back = from_matrix(to_matrix(p));
    CHECK((back - p).norm2() < 1e-24);
  }
}

TEST_CASE("quaternion units multiply by the Hamilton rule") {
  Quatd i = Quatd::unit(1), j = Quatd::unit(2), k = Quatd::unit(3);
  CHECK((i * j - k).norm2() == 0);
  CHECK((j * k - i).norm2() == 0);
  CHECK((k * i - j).norm2() == 0);
  CHECK((i * j * k + Quatd::unit(0)).norm2() == 0);
}

TEST_CASE("Kahler identity for the wedge contraction on random forms and metrics") {
  std::mt19937 rng(7);
  for (int t = 0; t < 40; ++t) {
    MetricPoint m = MetricPoint::hermitian(random_hermitian_metric(rng));
    QForm F = random_qform(rng);
    double lhs = 0.5 * lambda2_wedge(F, m);
    double lf = pair(lambda(F, m), lambda(F, m));
    double rhs = -norm2(F, m) + lf + 4 * norm2_02(F, m);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("hodge star squares to one and splits the norm") {
  std::mt19937 rng(3);
  MetricPoint m = MetricPoint::hermitian(random_hermitian_metric(rng));
  QForm F = random_qform(rng);
  QForm back = hodge(hodge(F, m), m);
  for (int k = 0; k < 6; ++k) CHECK((back.c[k] - F.c[k]).norm2() < 1e-20);
  double n = norm2(F, m);
  CHECK(n == doctest::Approx(norm2(self_dual_part(F, m), m) + norm2(anti_self_dual_part(F, m), m)));
  // F^F = (|F+|^2 - |F-|^2) vol
  double wedge = wedge_coefficient(F, F) / m.sqrt_det;
  CHECK(wedge == doctest::Approx(norm2(self_dual_part(F, m), m) - norm2(anti_self_dual_part(F, m), m)));
}

TEST_CASE("basic instanton: closed form curvature matches differentiation of the potential") {
  std::mt19937 rng(11);
  for (int t = 0; t < 20; ++t) {
    Quatd x = random_quat(rng, 1.5);
    QForm a = basic_curvature(x);
    QForm b = curvature_of([](const auto& y) { return basic_potential(y); }, x);
    for (int k = 0; k < 6; ++k) CHECK((a.c[k] - b.c[k]).norm2() < 1e-24);
    double r2 = x.norm2();
    CHECK(chern_weil_density(a) == doctest::Approx(48.0 / std::pow(1 + r2, 4)).epsilon(1e-12));
    CHECK(norm2(a, MetricPoint()) == doctest::Approx(48.0 / std::pow(1 + r2, 4)).epsilon(1e-12));
  }
}

TEST_CASE("basic instanton is anti-self-dual for the flat metric") {
  std::mt19937 rng(5);
  std::vector<Quatd> pts;
  for (int t = 0; t < 30; ++t) pts.push_back(random_quat(rng, 2.0));
  auto F = curvature(sample_basic(pts));
  auto res = asd_residual(F, flat_c2(1));
  CHECK(res.maxCoeff() < 1e-12);
}

TEST_CASE("'t Hooft curvature density matches the log-potential oracle") {
  InstantonSpec one{{Quatd{0.3, -0.2, 0.1, 0.4}}, {0.8}};
  InstantonSpec two{{Quatd{1, 0, 0, 0}, Quatd{-1, 0, 0, 0}}, {1.0, 0.7}};
  InstantonSpec three{{Quatd{1.5, 0, 0, 0}, Quatd{0, 0.2, 0, 0}, Quatd{-1.5, 0, 0.3, 0}}, {1.0, 0.5, 0.8}};
  std::mt19937 rng(17);
  for (const auto* spec : {&one, &two, &three}) {
    for (int t = 0; t < 6; ++t) {
      Quatd x = random_quat(rng, 1.2);
      double d = chern_weil_density(curvature_of([&](const auto& y) { return thooft_potential(*spec, y); }, x));
      double o = spec->charge() == 1 ? 0 : thooft_oracle_density(*spec, x, 4e-3);
      if (spec->charge() == 1) {
        double r2 = (x - spec->centers[0]).norm2();
        double l2 = spec->scales[0] * spec->scales[0];
        o = 48.0 * l2 * l2 / std::pow(1 + l2 * r2, 4);
      }
      CHECK(d == doctest::Approx(o).epsilon(2e-3));
    }
  }
}

TEST_CASE("'t Hooft fields are anti-self-dual away from the poles") {
  InstantonSpec two{{Quatd{1, 0, 0, 0}, Quatd{-1, 0, 0, 0}}, {1.0, 1.0}};
  std::vector<Quatd> pts{Quatd{0.2, 0.3, -0.1, 0.5}, Quatd{1, 0, 0, 0}, Quatd{2, 1, 0, -1}};
  auto A = sample_thooft(two, pts);
  REQUIRE(A.sample_errors.size() == 1);
  CHECK(A.sample_errors[0] == 1);
  auto F = curvature(A);
  CHECK(!F.valid[1]);
  auto res = asd_residual(F, flat_c2(1));
  CHECK(res(0) < 1e-12);
  CHECK(std::isnan(res(1)));
  CHECK(res(2) < 1e-12);
}

TEST_CASE("finite-difference curvature converges at second order") {
  double errs[2];
  int idx = 0;
  for (double h : {0.1, 0.05}) {
    CartesianGrid4 g;
    g.n = 5;
    g.h = h;
    g.origin = Eigen::Vector4d::Constant(0.3 - 2 * h);
    auto A = sample_on_grid(g, Provenance::perturbed, [](const Quatd& x) { return basic_instanton(x); });
    auto F = curvature(A);
    int centre = g.flat({2, 2, 2, 2});
    CHECK(F.interior(std::size_t(centre)));
    QForm exact = basic_curvature(A.points[std::size_t(centre)]);
    double e = 0;
    for (int k = 0; k < 6; ++k) e = std::max(e, std::sqrt((F.values[std::size_t(centre)].c[k] - exact.c[k]).norm2()));
    errs[idx++] = e;
  }
  double order = std::log2(errs[0] / errs[1]);
  CHECK(order > 1.8);
  CHECK(order < 2.3);
}

TEST_CASE("charge quadrature recovers integers") {
  auto e1 = instanton_number(InstantonSpec{{Quatd{}}, {1.0}});
  CHECK(std::abs(e1.k - 1) < 1e-3);
  auto e2 = instanton_number(InstantonSpec{{Quatd{1, 0, 0, 0}, Quatd{-1, 0, 0, 0}}, {1.0, 1.0}});
  CHECK(std::abs(e2.k - 2) < 2e-3);
  CHECK(e2.tail_bound < 1e-3);
}

TEST_CASE("charge of a field without a decay certificate is refused") {
  CartesianGrid4 g;
  g.n = 4;
  auto A = sample_on_grid(g, Provenance::perturbed, [](const Quatd& x) { return basic_instanton(x); });
  CHECK_THROWS_AS(instanton_number(A), InputError);
}

TEST_CASE("instanton spec validation") {
  CHECK_THROWS_AS((InstantonSpec{{Quatd{}}, {-1.0}}.validate()), InputError);
  CHECK_THROWS_AS((InstantonSpec{{Quatd{}, Quatd{}}, {1.0, 1.0}}.validate()), InputError);
  CHECK_THROWS_AS((InstantonSpec{{}, {}}.validate()), InputError);
}

TEST_CASE("density shape fit recovers the quartic decay") {
  std::mt19937 rng(21);
  std::vector<Quatd> pts;
  for (int t = 0; t < 200; ++t) pts.push_back(random_quat(rng, 3.0));
  auto fit = density_shape_fit(curvature(sample_basic(pts)));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.exponent == doctest::Approx(-4).epsilon(1e-10));
  CHECK(fit.amplitude == doctest::Approx(48).epsilon(1e-10));
  InstantonSpec s{{Quatd{0.5, 0, -1, 0}}, {2.0}};
  auto moved = density_shape_fit(curvature(sample_thooft(s, pts)), s.centers[0], 2.0);
  CHECK(moved.residual < 1e-10);
  CHECK(moved.amplitude == doctest::Approx(48 * 16).epsilon(1e-9));
  auto two = density_shape_fit(curvature(sample_thooft(InstantonSpec{{Quatd{1, 0, 0, 0}, Quatd{-1, 0, 0, 0}}, {1, 1}}, pts)));
  CHECK(two.residual > 1e-3);
}
