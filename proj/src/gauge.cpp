#include "kym/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/quadrature/gauss.hpp>

namespace kym {

OneFormValue basic_instanton(const Quatd& x) { return basic_potential(x); }

void InstantonSpec::validate() const {
  if (centers.empty()) throw InputError("instanton spec needs at least one center");
  if (centers.size() != scales.size()) throw InputError("centers and scales differ in length");
  for (double l : scales)
    if (!(l > 0) || !std::isfinite(l)) throw InputError("instanton scales must be positive");
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      if ((centers[i] - centers[j]).norm2() == 0.0) throw InputError("instanton centers must be distinct");
}

OneFormValue thooft_instanton(const InstantonSpec& spec, const Quatd& x) { return thooft_potential(spec, x); }

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::analytic_basic: return "analytic_basic";
    case Provenance::thooft: return "thooft";
    case Provenance::perturbed: return "perturbed";
    case Provenance::flat: return "flat";
  }
  return "unknown";
}

std::array<int, 4> CartesianGrid4::index(int f) const {
  std::array<int, 4> idx;
  for (int d = 3; d >= 0; --d) {
    idx[d] = f % n;
    f /= n;
  }
  return idx;
}

int CartesianGrid4::flat(const std::array<int, 4>& idx) const {
  int f = 0;
  for (int d = 0; d < 4; ++d) f = f * n + idx[d];
  return f;
}

Quatd CartesianGrid4::point(int f) const {
  auto idx = index(f);
  Quatd q;
  for (int d = 0; d < 4; ++d) q[d] = origin(d) + h * idx[d];
  return q;
}

ConnectionField sample_basic(const std::vector<Quatd>& points) {
  ConnectionField A;
  A.points = points;
  A.provenance = Provenance::analytic_basic;
  A.spec = InstantonSpec{{Quatd{}}, {1.0}};
  for (const auto& x : points) A.values.push_back(basic_instanton(x));
  return A;
}

ConnectionField sample_thooft(const InstantonSpec& spec, const std::vector<Quatd>& points) {
  spec.validate();
  ConnectionField A;
  A.points = points;
  A.provenance = Provenance::thooft;
  A.spec = spec;
  A.values.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      A.values[i] = thooft_instanton(spec, points[i]);
    } catch (const PoleError&) {
      A.values[i] = OneFormValue{};
      A.sample_errors.push_back(int(i));
    }
  }
  return A;
}

ConnectionField sample_flat(const std::vector<Quatd>& points) {
  ConnectionField A;
  A.points = points;
  A.provenance = Provenance::flat;
  A.values.assign(points.size(), OneFormValue{});
  return A;
}

ConnectionField sample_on_grid(const CartesianGrid4& grid, Provenance provenance,
                               const std::function<OneFormValue(const Quatd&)>& potential) {
  ConnectionField A;
  A.provenance = provenance;
  A.grid = grid;
  A.points.resize(std::size_t(grid.count()));
  A.values.resize(std::size_t(grid.count()));
  for (int f = 0; f < grid.count(); ++f) {
    A.points[std::size_t(f)] = grid.point(f);
    A.values[std::size_t(f)] = potential(A.points[std::size_t(f)]);
  }
  return A;
}

QForm basic_curvature(const Quatd& x) {
  double d = 1 + x.norm2();
  QForm F;
  for (int k = 0; k < 6; ++k) {
    Quatd a = Quatd::unit(kPairs[k][0]), b = Quatd::unit(kPairs[k][1]);
    F.c[k] = (a.conj() * b - b.conj() * a) / (d * d);
  }
  return F;
}

namespace {

CurvatureField finite_difference_curvature(const ConnectionField& A) {
  const CartesianGrid4& g = *A.grid;
  CurvatureField F;
  F.derivation = CurvatureField::Derivation::finite_difference;
  F.points = A.points;
  F.values.resize(A.size());
  F.boundary.assign(A.size(), 0);
  F.valid.assign(A.size(), 1);
  for (int f = 0; f < g.count(); ++f) {
    auto idx = g.index(f);
    std::array<std::array<Quatd, 4>, 4> dA;  // dA[mu][nu] = d_mu A_nu
    bool edge = false;
    for (int mu = 0; mu < 4; ++mu) {
      auto shifted = [&](int k) {
        auto j = idx;
        j[mu] += k;
        return A.values[std::size_t(g.flat(j))];
      };
      for (int nu = 0; nu < 4; ++nu) {
        Quatd d;
        if (idx[mu] == 0) {
          edge = true;
          d = (shifted(0)[nu] * -3.0 + shifted(1)[nu] * 4.0 - shifted(2)[nu]) / (2 * g.h);
        } else if (idx[mu] == g.n - 1) {
          edge = true;
          d = (shifted(0)[nu] * 3.0 - shifted(-1)[nu] * 4.0 + shifted(-2)[nu]) / (2 * g.h);
        } else {
          d = (shifted(1)[nu] - shifted(-1)[nu]) / (2 * g.h);
        }
        dA[mu][nu] = d;
      }
    }
    const auto& a = A.values[std::size_t(f)];
    QForm Fx;
    for (int k = 0; k < 6; ++k) {
      int mu = kPairs[k][0], nu = kPairs[k][1];
      Fx.c[k] = dA[mu][nu] - dA[nu][mu] + commutator(a[mu], a[nu]);
    }
    F.values[std::size_t(f)] = Fx;
    F.boundary[std::size_t(f)] = edge;
  }
  return F;
}

}  // namespace

CurvatureField curvature(const ConnectionField& A) {
  if (A.provenance == Provenance::perturbed) {
    if (!A.grid) throw InputError("finite-difference curvature needs a Cartesian grid");
    return finite_difference_curvature(A);
  }
  CurvatureField F;
  F.derivation = CurvatureField::Derivation::analytic;
  F.points = A.points;
  F.values.resize(A.size());
  F.boundary.assign(A.size(), 0);
  F.valid.assign(A.size(), 1);
  for (std::size_t i = 0; i < A.size(); ++i) {
    const Quatd& x = A.points[i];
    switch (A.provenance) {
      case Provenance::analytic_basic: F.values[i] = basic_curvature(x); break;
      case Provenance::flat: F.values[i] = QForm{}; break;
      case Provenance::thooft:
        try {
          const InstantonSpec& spec = *A.spec;
          F.values[i] = curvature_of([&](const auto& y) { return thooft_potential(spec, y); }, x);
        } catch (const PoleError&) {
          F.values[i] = QForm{};
          F.valid[i] = 0;
        }
        break;
      default: break;
    }
  }
  return F;
}


Eigen::VectorXd asd_residual(const CurvatureField& F, const KahlerData& metric) {
  const bool broadcast = metric.size() == 1;
  if (!broadcast && std::size_t(metric.size()) != F.size())
    throw InputError("metric and curvature sample counts differ");
  Eigen::VectorXd out(Eigen::Index(F.size()));
  std::optional<MetricPoint> shared;
  if (broadcast) shared = metric.metric_point(0);
  for (std::size_t i = 0; i < F.size(); ++i) {
    MetricPoint m = broadcast ? *shared : metric.metric_point(int(i));
    if (!(m.G.determinant() > 0) || m.G.llt().info() != Eigen::Success)
      throw NumericalError("degenerate metric at sample " + std::to_string(i));
    if (!F.valid.empty() && !F.valid[i]) {
      out(Eigen::Index(i)) = NAN;
      continue;
    }
    out(Eigen::Index(i)) = std::sqrt(norm2(self_dual_part(F.values[i], m), m));
  }
  return out;
}

double chern_weil_density(const QForm& F) { return trace_wedge_coefficient(F); }

Eigen::VectorXd chern_weil_density(const CurvatureField& F) {
  Eigen::VectorXd out(Eigen::Index(F.size()));
  for (std::size_t i = 0; i < F.size(); ++i) out(Eigen::Index(i)) = trace_wedge_coefficient(F.values[i]);
  return out;
}

DensityFit density_shape_fit(const CurvatureField& F, const Quatd& center, double scale) {
  std::vector<int> use;
  for (std::size_t i = 0; i < F.size(); ++i)
    if (F.interior(i)) use.push_back(int(i));
  if (use.size() < 3) throw InputError("density fit needs at least three interior samples");
  const int m = int(use.size());
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd y(m), rho(m);
  for (int j = 0; j < m; ++j) {
    const auto i = std::size_t(use[std::size_t(j)]);
    rho(j) = norm2(F.values[i], MetricPoint());
    if (!(rho(j) > 0)) throw NumericalError("density vanishes at sample " + std::to_string(i));
    X(j, 0) = 1;
    X(j, 1) = std::log1p(scale * scale * (F.points[i] - center).norm2());
    y(j) = std::log(rho(j));
  }
  Eigen::Vector2d c = X.colPivHouseholderQr().solve(y);
  DensityFit fit;
  fit.amplitude = std::exp(c(0));
  fit.exponent = c(1);
  fit.samples = m;
  Eigen::VectorXd model = (X * c).array().exp().matrix();
  fit.residual = (model - rho).cwiseAbs().maxCoeff() / rho.cwiseAbs().maxCoeff();
  return fit;
}

namespace {

template <int N>
void gl_fill(double a, double b, std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i] == 0.0) {
      x.push_back(c);
      w.push_back(h * wt[i]);
      continue;
    }
    x.push_back(c - h * ab[i]);
    w.push_back(h * wt[i]);
    x.push_back(c + h * ab[i]);
    w.push_back(h * wt[i]);
  }
}

}  // namespace

void gauss_legendre(int order, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  switch (order) {
    case 8: gl_fill<8>(a, b, x, w); break;
    case 12: gl_fill<12>(a, b, x, w); break;
    case 16: gl_fill<16>(a, b, x, w); break;
    case 20: gl_fill<20>(a, b, x, w); break;
    case 24: gl_fill<24>(a, b, x, w); break;
    case 32: gl_fill<32>(a, b, x, w); break;
    case 48: gl_fill<48>(a, b, x, w); break;
    default: throw InputError("unsupported Gauss-Legendre order " + std::to_string(order));
  }
}

namespace {

double spec_density(const InstantonSpec& spec, const Quatd& x) {
  if (spec.charge() == 1) {
    Quatd y = (x - spec.centers[0]) * spec.scales[0];
    double l4 = std::pow(spec.scales[0], 4);
    return l4 * trace_wedge_coefficient(basic_curvature(y));
  }
  return trace_wedge_coefficient(curvature_of([&](const auto& y) { return thooft_potential(spec, y); }, x));
}

}  // namespace

ChargeEstimate instanton_number(const InstantonSpec& spec, const ChargeOptions& opt) {
  spec.validate();
  const int k = spec.charge();
  Quatd c;
  for (const auto& b : spec.centers) c += b;
  c = c / double(k);
  double extent = 0, lmax = 0, lmin = INFINITY;
  for (int j = 0; j < k; ++j) {
    extent = std::max(extent, std::sqrt((spec.centers[std::size_t(j)] - c).norm2()));
    lmax = std::max(lmax, spec.scales[std::size_t(j)]);
    lmin = std::min(lmin, spec.scales[std::size_t(j)]);
  }

  // tail constant: density <= C |x - c|^-8 far out, C read off a shell
  const double shell = 8 * (extent + 1.0 / lmin);
  double C = 0;
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      double psi = M_PI * (a + 0.5) / 8, th = M_PI * (b + 0.5) / 8;
      Quatd dir{std::cos(psi), std::sin(psi) * std::cos(th), std::sin(psi) * std::sin(th), 0.0};
      Quatd x = c + dir * shell;
      C = std::max(C, std::abs(spec_density(spec, x)) * std::pow(shell, 8));
    }
  C *= 1.5;
  double R = std::max(shell, std::pow(C / (8 * opt.rel_tol * k), 0.25));

  // radial panels refined around the scale and the center offsets
  std::set<double> cuts{0.0, R};
  double l = 0.25 / lmax;
  while (l < R) {
    cuts.insert(l);
    l *= 2;
  }
  for (int j = 0; j < k; ++j) {
    double d = std::sqrt((spec.centers[std::size_t(j)] - c).norm2());
    double w = 1.0 / spec.scales[std::size_t(j)];
    for (double e : {d - w, d, d + w})
      if (e > 0 && e < R) cuts.insert(e);
  }
  std::vector<double> edges(cuts.begin(), cuts.end());
  std::vector<double> rx, rw;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) gauss_legendre(opt.radial_order, edges[i], edges[i + 1], rx, rw);

  std::vector<double> terms;
  if (k == 1) {
    for (std::size_t i = 0; i < rx.size(); ++i) {
      Quatd x = c + Quatd{rx[i], 0, 0, 0};
      terms.push_back(2 * M_PI * M_PI * rw[i] * std::pow(rx[i], 3) * spec_density(spec, x));
    }
  } else {
    std::vector<double> px, pw, tx, tw;
    gauss_legendre(opt.polar_nodes, 0, M_PI, px, pw);
    gauss_legendre(opt.polar_nodes, 0, M_PI, tx, tw);
    const int na = opt.azimuth_nodes;
    terms.reserve(rx.size() * px.size() * tx.size() * std::size_t(na));
    for (std::size_t i = 0; i < rx.size(); ++i)
      for (std::size_t a = 0; a < px.size(); ++a)
        for (std::size_t b = 0; b < tx.size(); ++b)
          for (int e = 0; e < na; ++e) {
            double ph = 2 * M_PI * e / na;
            double sp = std::sin(px[a]), st = std::sin(tx[b]);
            Quatd dir{std::cos(px[a]), sp * std::cos(tx[b]), sp * st * std::cos(ph), sp * st * std::sin(ph)};
            double w = rw[i] * pw[a] * tw[b] * (2 * M_PI / na) * std::pow(rx[i], 3) * sp * sp * st;
            double dens = 0;
            try {
              dens = spec_density(spec, c + dir * rx[i]);
            } catch (const PoleError&) {
              dens = 0;  // measure zero
            }
            terms.push_back(w * dens);
          }
  }
  ChargeEstimate est;
  est.k = tree_sum(terms) / (8 * M_PI * M_PI);
  est.radius = R;
  est.tail_constant = C;
  est.tail_bound = C / (16 * std::pow(R, 4));
  return est;
}

ChargeEstimate instanton_number(const ConnectionField& A, const ChargeOptions& opt) {
  switch (A.provenance) {
    case Provenance::flat: return ChargeEstimate{};
    case Provenance::analytic_basic: return instanton_number(A.spec ? *A.spec : InstantonSpec{{Quatd{}}, {1.0}}, opt);
    case Provenance::thooft: return instanton_number(*A.spec, opt);
    case Provenance::perturbed: break;
  }
  if (!A.decay_certificate || !std::isfinite(*A.decay_certificate))
    throw InputError("refusing charge quadrature: field carries no weighted-decay certificate");
  if (!A.grid) throw InputError("perturbed field needs a Cartesian grid for quadrature");
  CurvatureField F = curvature(A);
  const CartesianGrid4& g = *A.grid;
  Eigen::Vector4d center = g.origin + Eigen::Vector4d::Constant(0.5 * g.h * (g.n - 1));
  std::vector<double> terms;
  double C = 0;
  double R = 0.5 * g.h * (g.n - 1);
  for (int f = 0; f < g.count(); ++f) {
    auto idx = g.index(f);
    double w = std::pow(g.h, 4);
    for (int d = 0; d < 4; ++d)
      if (idx[d] == 0 || idx[d] == g.n - 1) w *= 0.5;
    double dens = trace_wedge_coefficient(F.values[std::size_t(f)]);
    terms.push_back(w * dens);
    if (F.boundary[std::size_t(f)]) {
      double r = (A.points[std::size_t(f)].vector() - center).norm();
      C = std::max(C, std::abs(dens) * std::pow(r, 8));
    }
  }
  ChargeEstimate est;
  est.k = tree_sum(terms) / (8 * M_PI * M_PI);
  est.radius = R;
  est.tail_constant = C;
  est.tail_bound = C / (16 * std::pow(R, 4));
  return est;
}

}  // namespace kym
