#include "kym/kahler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kym {

std::string to_string(Geometry g) {
  switch (g) {
    case Geometry::c2_radial: return "C2_radial";
    case Geometry::torus: return "torus";
    case Geometry::riemann_surface: return "riemann_surface";
    case Geometry::p1_fubini_study: return "P1_fubini_study";
  }
  return "unknown";
}

Geometry geometry_from_string(const std::string& s) {
  if (s == "C2_radial") return Geometry::c2_radial;
  if (s == "torus" || s == "torus_T4" || s == "torus_T2") return Geometry::torus;
  if (s == "riemann_surface") return Geometry::riemann_surface;
  if (s == "P1_fubini_study" || s == "P1") return Geometry::p1_fubini_study;
  throw InputError("unknown geometry '" + s + "'");
}

MetricPoint KahlerData::metric_point(int i) const {
  if (n != 2) throw InputError("4D metric requested on a geometry of complex dimension " + std::to_string(n));
  return MetricPoint::hermitian(metric[std::size_t(i)]);
}

double KahlerData::volume() const { return tree_sum(vol); }

double KahlerData::average_scalar() const { return weighted_sum(vol, scalar) / volume(); }

double KahlerData::scalar_spread() const {
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < size(); ++i) {
    if (!interior(i)) continue;
    lo = std::min(lo, scalar(i));
    hi = std::max(hi, scalar(i));
  }
  return hi - lo;
}

namespace {

void require_positive(double g, int i, const char* what) {
  if (!(g > 0)) {
    std::ostringstream os;
    os << "metric loses positivity at sample " << i << " (" << what << " = " << g << ")";
    throw NumericalError(os.str());
  }
}

Eigen::Matrix2cd diag2(double a, double b) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

KahlerData metric_from_slope_c2(const RadialGrid& grid, const Eigen::VectorXd& p) {
  const int n = grid.size();
  if (p.size() != n) throw InputError("slope samples do not match the grid");
  if (!grid.origin_regular()) throw InputError("C2_radial needs a grid regular at the origin");
  KahlerData K;
  K.geometry = Geometry::c2_radial;
  K.n = 2;
  K.grid = grid;
  K.coord = grid.r;
  K.p = p;
  auto j = radial_metric_jets(grid, p.data());
  K.metric.resize(n);
  K.ricci.resize(n);
  K.scalar.resize(n);
  K.boundary.assign(n, 0);
  K.boundary[n - 1] = 1;
  for (int i = 0; i < n; ++i) {
    require_positive(j.g1[i], i, "g1");
    require_positive(j.g2[i], i, "g2");
    K.metric[i] = diag2(j.g1[i], j.g2[i]);
  }
  for (int i = 0; i < n - 1; ++i) K.scalar(i) = radial_scalar_curvature(grid, p.data(), j, i);
  K.scalar(n - 1) = 2 * K.scalar(n - 2) - K.scalar(n - 3);

  for (int i = 0; i < n; ++i) {
    double Ls = ds_at(grid, j.L.data(), i);
    int c = std::clamp(i, 1, n - 2);
    auto w = d2_weights(grid.s(c - 1), grid.s(c), grid.s(c + 1));
    double Lss = w[0] * j.L[c - 1] + w[1] * j.L[c] + w[2] * j.L[c + 1];
    K.ricci[i] = diag2(-(Ls + grid.s(i) * Lss), -Ls);
  }

  K.vol = grid.volume_weights();
  for (int i = 0; i < n; ++i) K.vol(i) *= j.g1[i] * j.g2[i];

  K.phi.resize(n);
  K.phi(n - 1) = 0;
  for (int i = n - 2; i >= 0; --i) K.phi(i) = K.phi(i + 1) - 0.5 * (p(i) + p(i + 1)) * (grid.s(i + 1) - grid.s(i));
  return K;
}

KahlerData metric_from_potential_c2(const RadialGrid& grid, const Eigen::VectorXd& phi) {
  if (phi.size() != grid.size()) throw InputError("potential samples do not match the grid");
  Eigen::VectorXd p(grid.size());
  for (int i = 0; i < grid.size(); ++i) p(i) = ds_at(grid, phi.data(), i);
  KahlerData K = metric_from_slope_c2(grid, p);
  K.phi = phi;
  return K;
}

KahlerData metric_from_potential_torus(int n, const Eigen::VectorXd& phi) {
  if (n != 1 && n != 2) throw InputError("torus dimension must be 1 or 2");
  const int N = int(phi.size());
  if (N < 5) throw InputError("torus needs at least 5 samples");
  const double h = 2 * M_PI / N;
  KahlerData K;
  K.geometry = Geometry::torus;
  K.n = n;
  K.genus = 1;
  K.spacing = h;
  K.phi = phi;
  K.coord = Eigen::VectorXd::LinSpaced(N, 0.0, h * (N - 1));
  Eigen::VectorXd g = Eigen::VectorXd::Ones(N) + 0.25 * periodic_d2(phi, h);
  for (int i = 0; i < N; ++i) require_positive(g(i), i, "g11");
  Eigen::VectorXd logg = g.array().log();
  Eigen::VectorXd d2 = periodic_d2(logg, h);
  K.scalar = -d2.cwiseQuotient(g);
  K.metric.resize(N);
  K.ricci.resize(N);
  for (int i = 0; i < N; ++i) {
    K.metric[i] = diag2(g(i), 1.0);
    K.ricci[i] = diag2(-0.25 * d2(i), 0.0);
  }
  K.vol = g * (h * std::pow(2 * M_PI, 2 * n - 1));
  K.boundary.assign(N, 0);
  return K;
}

KahlerData metric_from_potential_p1(double t_max, const Eigen::VectorXd& phi) {
  const int N = int(phi.size());
  if (N < 5 || t_max <= 0) throw InputError("P1 grid needs at least 5 samples and t_max > 0");
  const double h = 2 * t_max / (N - 1);
  KahlerData K;
  K.geometry = Geometry::p1_fubini_study;
  K.n = 1;
  K.spacing = h;
  K.phi = phi;
  K.coord = Eigen::VectorXd::LinSpaced(N, -t_max, t_max);
  Eigen::VectorXd vfs(N), v(N);
  Eigen::VectorXd phitt = clamped_d2(phi, h);
  for (int i = 0; i < N; ++i) {
    double c = std::cosh(0.5 * K.coord(i));
    vfs(i) = 0.25 / (c * c);
    v(i) = vfs(i) + phitt(i);
    require_positive(v(i), i, "v");
  }
  Eigen::VectorXd rel(N);
  for (int i = 0; i < N; ++i) rel(i) = std::log1p(phitt(i) / vfs(i));
  Eigen::VectorXd logv_tt = -2.0 * vfs + clamped_d2(rel, h);
  K.scalar = -4.0 * logv_tt.cwiseQuotient(v);
  K.metric.resize(N);
  K.ricci.resize(N);
  for (int i = 0; i < N; ++i) {
    double s = std::exp(K.coord(i));
    K.metric[i] = diag2(v(i) / s, 1.0);
    K.ricci[i] = diag2(-logv_tt(i) / s, 0.0);
  }
  K.vol = (M_PI * h) * v;
  K.vol(0) *= 0.5;
  K.vol(N - 1) *= 0.5;
  K.boundary.assign(N, 0);
  return K;
}

KahlerData riemann_surface_reference(int genus, const Eigen::VectorXd& phi) {
  if (genus < 2) throw InputError("constant negative curvature reference needs genus >= 2");
  if (phi.size() > 0 && phi.cwiseAbs().maxCoeff() != 0.0)
    throw InputError("the genus >= 2 reference only carries phi = 0");
  KahlerData K;
  K.geometry = Geometry::riemann_surface;
  K.n = 1;
  K.genus = genus;
  K.phi = Eigen::VectorXd::Zero(1);
  K.coord = Eigen::VectorXd::Zero(1);
  K.metric = {diag2(1.0, 1.0)};
  K.ricci = {diag2(-0.5, 0.0)};
  K.scalar = Eigen::VectorXd::Constant(1, -2.0);
  K.vol = Eigen::VectorXd::Constant(1, 4 * M_PI * (genus - 1));
  K.boundary.assign(1, 0);
  return K;
}

KahlerData metric_from_potential(Geometry geometry, const Eigen::VectorXd& phi, const RadialGrid* grid, int n,
                                 double t_max, int genus) {
  switch (geometry) {
    case Geometry::c2_radial:
      if (!grid) throw InputError("C2_radial needs a radial grid");
      return metric_from_potential_c2(*grid, phi);
    case Geometry::torus: return metric_from_potential_torus(n, phi);
    case Geometry::p1_fubini_study: return metric_from_potential_p1(t_max, phi);
    case Geometry::riemann_surface: return riemann_surface_reference(genus, phi);
  }
  throw InputError("unknown geometry");
}

KahlerData flat_c2(int count) {
  KahlerData K;
  K.geometry = Geometry::c2_radial;
  K.n = 2;
  K.coord = Eigen::VectorXd::Zero(count);
  K.phi = Eigen::VectorXd::Zero(count);
  K.p = Eigen::VectorXd::Zero(count);
  K.metric.assign(count, Eigen::Matrix2cd::Identity());
  K.ricci.assign(count, Eigen::Matrix2cd::Zero());
  K.scalar = Eigen::VectorXd::Zero(count);
  K.vol = Eigen::VectorXd::Zero(count);
  K.boundary.assign(count, 0);
  return K;
}

KahlerData scaled(const KahlerData& K, double c) {
  if (!(c > 0)) throw InputError("homothety factor must be positive");
  KahlerData out = K;
  for (auto& g : out.metric) g *= c;
  out.scalar /= c;
  out.vol *= std::pow(c, K.n);
  out.phi *= c;
  out.scale *= c;
  return out;
}

ScalarCurvatureReport scalar_curvature(const KahlerData& K) {
  ScalarCurvatureReport r;
  r.S = K.scalar;
  if (K.compact()) r.average = K.average_scalar();
  return r;
}

Eigen::VectorXd ricci_closedness_defect(const KahlerData& K) {
  if (K.geometry != Geometry::c2_radial || !K.grid) throw InputError("closedness defect is defined on C2_radial");
  const RadialGrid& g = *K.grid;
  const int n = g.size();
  Eigen::VectorXd a(n), b(n), out(n);
  for (int i = 0; i < n; ++i) {
    a(i) = K.ricci[i](1, 1).real();
    b(i) = (K.ricci[i](0, 0).real() - a(i)) / g.s(i);
  }
  for (int i = 0; i < n; ++i) out(i) = b(i) - ds_at(g, a.data(), i);
  return out;
}

TopologicalConstants topological_constants(const KahlerData& K, const Eigen::VectorXd& ff, double alpha0,
                                           double alpha1, double z2) {
  TopologicalConstants t;
  if (K.n >= 2) {
    if (ff.size() != K.size()) throw InputError("density samples do not match the metric");
    t.chern_weil_integral = weighted_sum(K.vol, ff);
  }
  if (K.compact()) {
    t.S_hat = K.average_scalar();
    t.c_hat = K.n >= 2 ? t.chern_weil_integral / K.volume() : 0.0;
  } else {
    // decaying data on C2: |ff| <= C r^-8 beyond the last node, finite integral, infinite volume
    const int n = K.size();
    const double r = K.coord(n - 1);
    const double C = std::abs(ff(n - 1)) * std::pow(r, 8);
    t.tail_bound = 2 * M_PI * M_PI * C / (4 * std::pow(r, 4));
    if (!(t.tail_bound <= 1e-3 * std::max(1.0, std::abs(t.chern_weil_integral))))
      throw InputError("density is not integrable on the truncated C2 at the available decay");
    t.S_hat = 0;
    t.c_hat = 0;
  }
  t.c_z = alpha0 * t.S_hat + alpha1 * (2 * t.c_hat - 4 * z2);
  return t;
}

FormField wedge(const std::vector<RForm>& a, const std::vector<RForm>& b) {
  if (a.size() != b.size()) throw InputError("wedge of fields with different sample counts");
  FormField f;
  f.degree = 4;
  f.four.resize(Eigen::Index(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) f.four(Eigen::Index(i)) = wedge_coefficient(a[i], b[i]);
  return f;
}

FormField kahler_form_field(const KahlerData& K) {
  FormField f;
  f.degree = 2;
  f.two.resize(std::size_t(K.size()));
  for (int i = 0; i < K.size(); ++i) f.two[std::size_t(i)] = kahler_form(K.metric_point(i));
  return f;
}

Eigen::VectorXd lambda_contract(const FormField& form, const KahlerData& K, int power) {
  if (form.degree == 2 && power == 1) {
    Eigen::VectorXd out(Eigen::Index(form.two.size()));
    for (std::size_t i = 0; i < form.two.size(); ++i) out(Eigen::Index(i)) = lambda(form.two[i], K.metric_point(int(i)));
    return out;
  }
  if (form.degree == 4 && power == 2) {
    Eigen::VectorXd out(form.four.size());
    for (Eigen::Index i = 0; i < form.four.size(); ++i) out(i) = lambda2_of_coefficient(form.four(i), K.metric_point(int(i)));
    return out;
  }
  throw InputError("degree mismatch: Lambda^" + std::to_string(power) + " of a " + std::to_string(form.degree) +
                   "-form");
}

}  // namespace kym
