#include "kym/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/SparseLU>

namespace kym {

using C = std::complex<double>;

std::string to_string(ConstantConvention c) { return c == ConstantConvention::decaying ? "decaying" : "literal"; }

double radial_constant(ConstantConvention c, double alpha, int k) {
  return c == ConstantConvention::literal ? alpha * 8 * M_PI * M_PI * k : 0.0;
}

double ResidualPair::hermitian_norm() const {
  double m = 0;
  for (std::size_t i = 0; i < hermitian.size(); ++i)
    if (interior.empty() || interior[i]) m = std::max(m, hermitian[i].cwiseAbs().maxCoeff());
  return m;
}

double ResidualPair::scalar_norm() const {
  double m = 0;
  for (Eigen::Index i = 0; i < scalar.size(); ++i)
    if (interior.empty() || interior[std::size_t(i)]) m = std::max(m, std::abs(scalar(i)));
  return m;
}

QForm radial_curvature_form(const RadialCurvature<double>& c) {
  Eigen::Matrix2cd sigma = Eigen::Matrix2cd::Zero(), e12 = Eigen::Matrix2cd::Zero(), e21 = Eigen::Matrix2cd::Zero();
  sigma(0, 0) = 1;
  sigma(1, 1) = -1;
  e12(0, 1) = 1;
  e21(1, 0) = 1;
  std::array<std::array<Eigen::Matrix2cd, 2>, 2> M;
  M[0][0] = c.A1 * sigma;
  M[1][1] = c.A2 * sigma;
  M[0][1] = c.B * e12;
  M[1][0] = c.B * e21;
  return from_complex_components(M);
}

RadialCurvature<double> radial_curvature_at(const RadialGrid& g, const SeedProfile& seed, const Eigen::VectorXd& f,
                                            int i) {
  return radial_curvature(g, seed, f.data(), i);
}

std::vector<Eigen::Vector2cd> line_bundle_lambda(const KahlerData& K, const LineBundleData& L) {
  const int m = int(L.degrees.size());
  if (m < 1 || m > 2) throw InputError("line bundle data needs one or two summands");
  if (!L.chi.empty() && int(L.chi.size()) != m) throw InputError("one chi profile per summand");
  const int N = K.size();
  std::vector<Eigen::Vector2cd> out(std::size_t(N), Eigen::Vector2cd::Zero());
  const C I(0, 1);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd chi = L.chi.empty() || L.chi[std::size_t(j)].size() == 0 ? Eigen::VectorXd::Zero(N)
                                                                              : L.chi[std::size_t(j)];
    if (chi.size() != N) throw InputError("chi samples do not match the metric");
    const int d = L.degrees[std::size_t(j)];
    switch (K.geometry) {
      case Geometry::torus: {
        if (K.n == 2 && d != 0) throw InputError("only degree-zero line bundles on the flat T^4");
        Eigen::VectorXd chixx = periodic_d2(chi, K.spacing);
        const double vol0 = std::pow(2 * M_PI, 2 * K.n);
        for (int i = 0; i < N; ++i)
          out[std::size_t(i)](j) = -2.0 * I * (M_PI * d / vol0 + 0.25 * chixx(i)) / K.metric[std::size_t(i)](0, 0).real();
        break;
      }
      case Geometry::p1_fubini_study: {
        Eigen::VectorXd chitt = clamped_d2(chi, K.spacing);
        for (int i = 0; i < N; ++i) {
          double t = K.coord(i), ch = std::cosh(0.5 * t);
          double vfs = 0.25 / (ch * ch);
          double v = K.metric[std::size_t(i)](0, 0).real() * std::exp(t);
          out[std::size_t(i)](j) = -2.0 * I * (d * vfs + chitt(i)) / v;
        }
        break;
      }
      case Geometry::riemann_surface: {
        if (chi.cwiseAbs().maxCoeff() != 0) throw InputError("the genus >= 2 reference carries chi = 0 only");
        for (int i = 0; i < N; ++i) out[std::size_t(i)](j) = -2.0 * M_PI * I * double(d) / K.volume();
        break;
      }
      case Geometry::c2_radial: throw InputError("line bundle data given on C2_radial");
    }
  }
  return out;
}

Eigen::Matrix2cd matched_center(const KahlerData& K, const LineBundleData& L) {
  Eigen::Matrix2cd z = Eigen::Matrix2cd::Zero();
  const double vol = K.geometry == Geometry::torus && K.n == 2 ? 1.0 : K.volume();
  for (std::size_t j = 0; j < L.degrees.size() && j < 2; ++j) z(Eigen::Index(j), Eigen::Index(j)) = -2.0 * M_PI * C(0, 1) * double(L.degrees[j]) / vol;
  return z;
}

ResidualPair coupled_residual(const SolutionPair& P, const Eigen::Matrix2cd& z, double c) {
  const KahlerData& K = P.metric;
  const double a0 = P.coupling.alpha0, a1 = P.coupling.alpha1;
  ResidualPair out;
  if (P.radial) {
    if (K.geometry != Geometry::c2_radial || !K.grid) throw InputError("radial connection on a non-radial geometry");
    const RadialGrid& g = *K.grid;
    const int n = g.size();
    if (P.radial->f.size() != n) throw InputError("connection and metric sample counts differ");
    out.hermitian.resize(std::size_t(n));
    out.scalar.resize(n);
    out.interior.assign(std::size_t(n), 1);
    out.interior[std::size_t(n - 1)] = 0;
    for (int i = 0; i < n; ++i) {
      QForm F = radial_curvature_form(radial_curvature_at(g, P.radial->seed, P.radial->f, i));
      MetricPoint m = K.metric_point(i);
      out.hermitian[std::size_t(i)] = to_matrix(lambda(F, m)) - z;
      out.scalar(i) = a0 * K.scalar(i) + a1 * lambda2_wedge(F, m) - c;
    }
    return out;
  }
  if (P.field) {
    if (K.n != 2) throw InputError("a 4D curvature field needs a complex surface");
    const CurvatureField& F = *P.field;
    const bool broadcast = K.size() == 1;
    if (!broadcast && std::size_t(K.size()) != F.size()) throw InputError("metric and curvature sample counts differ");
    out.hermitian.resize(F.size());
    out.scalar.resize(Eigen::Index(F.size()));
    out.interior.resize(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) {
      int k = broadcast ? 0 : int(i);
      MetricPoint m = K.metric_point(k);
      out.hermitian[i] = to_matrix(lambda(F.values[i], m)) - z;
      out.scalar(Eigen::Index(i)) = a0 * K.scalar(k) + a1 * lambda2_wedge(F.values[i], m) - c;
      out.interior[i] = F.interior(i) && K.interior(k);
    }
    return out;
  }
  if (P.bundle) {
    auto lam = line_bundle_lambda(K, *P.bundle);
    const int n = K.size();
    out.hermitian.resize(std::size_t(n));
    out.scalar.resize(n);
    out.interior.assign(std::size_t(n), 1);
    for (int i = 0; i < n; ++i) {
      Eigen::Matrix2cd h = Eigen::Matrix2cd::Zero();
      h(0, 0) = lam[std::size_t(i)](0);
      h(1, 1) = lam[std::size_t(i)](1);
      out.hermitian[std::size_t(i)] = h - z;
      out.scalar(i) = a0 * K.scalar(i) - c;  // no 4-forms on a curve; F^F on T^4 vanishes for one direction
      out.interior[std::size_t(i)] = K.interior(i);
    }
    return out;
  }
  throw InputError("solution pair carries no connection data");
}

std::vector<Quatd> C2Residual::su2() const {
  std::vector<Quatd> out(std::size_t(lambda.size()));
  for (Eigen::Index i = 0; i < lambda.size(); ++i) out[std::size_t(i)] = Quatd{0, lambda(i), 0, 0};
  return out;
}

C2Residual c2_residual(const RadialGrid& g, const SeedProfile& seed, double alpha, int k, const Eigen::VectorXd& p,
                       const Eigen::VectorXd& f, ConstantConvention cc) {
  const int n = g.size();
  if (p.size() != n || f.size() != n) throw InputError("profile samples do not match the grid");
  std::vector<double> out(std::size_t(2 * n));
  c2_rows(g, seed, alpha, radial_constant(cc, alpha, k), p.data(), f.data(), out.data());
  C2Residual r;
  r.scalar.resize(n - 1);
  r.lambda.resize(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    r.scalar(i) = out[std::size_t(2 * i)];
    r.lambda(i) = out[std::size_t(2 * i + 1)];
  }
  r.decay_p = out[std::size_t(2 * n - 2)];
  r.decay_f = out[std::size_t(2 * n - 1)];
  return r;
}

Eigen::VectorXd linearization_apply(const RadialGrid& g, const SeedProfile& seed, const Eigen::VectorXd& dp,
                                    const Eigen::VectorXd& df) {
  const int n = g.size();
  Eigen::VectorXd dq(n), dL(n), out(2 * n);
  for (int i = 0; i < n; ++i) {
    dq(i) = g.s(i) * ds_at(g, dp.data(), i);
    dL(i) = 2 * dp(i) + dq(i);
  }
  auto phi_flux = [&](int k) { return g.sh(k + 1) * g.sh(k + 1) * (dL(k + 1) - dL(k)) / (g.s(k + 1) - g.s(k)); };
  auto f_flux = [&](int k) { return g.sh(k + 1) * (df(k + 1) - df(k)) / (g.s(k + 1) - g.s(k)); };
  for (int i = 0; i < n - 1; ++i) {
    const double s = g.s(i);
    double dS = -4 * (phi_flux(i) - (i == 0 ? 0.0 : phi_flux(i - 1))) / (s * (g.sh(i + 1) - g.sh(i)));
    double dA1 = -(f_flux(i) - (i == 0 ? 0.0 : f_flux(i - 1))) / (g.sh(i + 1) - g.sh(i));
    double psi0 = seed.psi(s);
    double dA2 = 2 * std::exp(2 * psi0) * df(i) / s - ds_at(g, df.data(), i);
    double A10 = seed.a1(s), A20 = std::expm1(2 * psi0) / s - seed.dpsi(s);
    double dg1 = dp(i) + dq(i), dg2 = dp(i);
    out(2 * i) = dS;
    out(2 * i + 1) = -2 * (dA1 + dA2) + 2 * (A10 * dg1 + A20 * dg2);
  }
  auto w = d1_weights(g.s(n - 1), g.s(n - 3), g.s(n - 2), g.s(n - 1));
  const double scale = (g.s(n - 1) - g.s(n - 2)) / g.s(n - 1);
  auto decay = [&](const Eigen::VectorXd& v) {
    return scale * (w[0] * g.s(n - 3) * v(n - 3) + w[1] * g.s(n - 2) * v(n - 2) + w[2] * g.s(n - 1) * v(n - 1));
  };
  out(2 * n - 2) = decay(dp);
  out(2 * n - 1) = decay(df);
  return out;
}

Eigen::MatrixXd linearization_matrix_phi(const RadialGrid& g, const SeedProfile& seed) {
  const int n = g.size();
  Eigen::MatrixXd M(2 * n, 2 * n);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j), p(n);
    for (int i = 0; i < n; ++i) p(i) = ds_at(g, e.data(), i);
    M.col(j) = linearization_apply(g, seed, p, zero);
    M.col(n + j) = linearization_apply(g, seed, zero, e);
  }
  return M;
}

Eigen::VectorXd RadialSystem::interleave(const Eigen::VectorXd& p, const Eigen::VectorXd& f) {
  Eigen::VectorXd x(2 * p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    x(2 * i) = p(i);
    x(2 * i + 1) = f(i);
  }
  return x;
}

void RadialSystem::split(const Eigen::VectorXd& x, Eigen::VectorXd& p, Eigen::VectorXd& f) {
  const Eigen::Index n = x.size() / 2;
  p.resize(n);
  f.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = x(2 * i);
    f(i) = x(2 * i + 1);
  }
}

Eigen::VectorXd RadialSystem::residual(double alpha, const Eigen::VectorXd& x) const {
  Eigen::VectorXd p, f, out(unknowns());
  split(x, p, f);
  c2_rows(grid, seed, alpha, radial_constant(constant, alpha, k), p.data(), f.data(), out.data());
  return out;
}

Eigen::VectorXd RadialSystem::residual_and_jacobian(double alpha, const Eigen::VectorXd& x,
                                                    Eigen::SparseMatrix<double>& J) const {
  using Vec10 = Eigen::Matrix<double, 10, 1>;
  using AD = Eigen::AutoDiffScalar<Vec10>;
  const int n = grid.size(), m = 2 * n;
  std::vector<AD> p(static_cast<std::size_t>(n)), f(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(m));
  for (int j = 0; j < n; ++j) {
    p[std::size_t(j)] = AD(x(2 * j), Vec10::Unit((2 * j) % 10));
    f[std::size_t(j)] = AD(x(2 * j + 1), Vec10::Unit((2 * j + 1) % 10));
  }
  c2_rows(grid, seed, alpha, radial_constant(constant, alpha, k), p.data(), f.data(), out.data());
  Eigen::VectorXd r(m);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(m) * 10);
  for (int row = 0; row < m; ++row) {
    const AD& v = out[std::size_t(row)];
    r(row) = v.value();
    if (v.derivatives().size() == 0) continue;
    // every column touched by this row lies in [2i - 5, 2i + 4]
    const int lo = 2 * (row / 2) - 5;
    for (int col = std::max(0, lo); col <= std::min(m - 1, lo + 9); ++col) {
      double d = v.derivatives()(col % 10);
      if (d != 0) trip.emplace_back(row, col, d);
    }
  }
  J.resize(m, m);
  J.setFromTriplets(trip.begin(), trip.end());
  return r;
}

namespace {

struct Norms {
  double scalar = 0, hermitian = 0, decay = 0;
  double max() const { return std::max({scalar, hermitian, decay}); }
};

Norms norms_of(const Eigen::VectorXd& r) {
  const Eigen::Index n = r.size() / 2;
  Norms out;
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    out.scalar = std::max(out.scalar, std::abs(r(2 * i)));
    out.hermitian = std::max(out.hermitian, std::abs(r(2 * i + 1)));
  }
  out.decay = std::max(std::abs(r(2 * n - 2)), std::abs(r(2 * n - 1)));
  if (!r.allFinite()) out.scalar = out.hermitian = INFINITY;
  return out;
}

}  // namespace

NewtonReport newton_solve(const RadialSystem& sys, double alpha, Eigen::VectorXd& x, const NewtonOptions& opt) {
  NewtonReport rep;
  Eigen::SparseMatrix<double> J;
  for (int it = 0;; ++it) {
    Eigen::VectorXd r;
    try {
      r = sys.residual_and_jacobian(alpha, x, J);
    } catch (const NumericalError& e) {
      rep.diagnostic = e.what();
      return rep;
    }
    Norms nm = norms_of(r);
    rep.history.push_back(nm.max());
    rep.residual_scalar = nm.scalar;
    rep.residual_hermitian = nm.hermitian;
    if (nm.scalar < opt.tol && nm.hermitian < opt.tol && nm.decay < opt.tol) {
      rep.converged = true;
      return rep;
    }
    if (it == opt.max_iterations) {
      rep.diagnostic = "no convergence in " + std::to_string(opt.max_iterations) + " iterations";
      return rep;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      rep.diagnostic = "singular Jacobian";
      return rep;
    }
    Eigen::VectorXd dx = lu.solve(-r);
    const double merit = r.norm();
    double t = 1;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
      Eigen::VectorXd xt = x + t * dx;
      try {
        Eigen::VectorXd rt = sys.residual(alpha, xt);
        if (rt.allFinite() && rt.norm() < (1 - 1e-4 * t) * merit) {
          x = xt;
          accepted = true;
          break;
        }
      } catch (const NumericalError&) {
      }
    }
    rep.iterations = it + 1;
    if (!accepted) {
      rep.diagnostic = "line search failed";
      return rep;
    }
  }
}

SolutionPair assemble_radial_pair(const RadialSystem& sys, double alpha, const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& f, int newton_iterations) {
  SolutionPair P;
  P.metric = metric_from_slope_c2(sys.grid, p);
  P.radial = RadialConnection{sys.seed, f};
  P.coupling = CouplingConstants::from_radial(alpha);
  P.charge = sys.k;
  P.alpha = alpha;
  P.constant = sys.constant;
  auto r = c2_residual(sys.grid, sys.seed, alpha, sys.k, p, f, sys.constant);
  P.residual_scalar = r.scalar_norm();
  P.residual_hermitian = r.hermitian_norm();
  P.newton_iterations = newton_iterations;
  return P;
}

RadialSystem radial_system_of(const SolutionPair& P) {
  if (!P.radial || !P.metric.grid) throw InputError("not a radial solution pair");
  RadialSystem sys;
  sys.grid = *P.metric.grid;
  sys.seed = P.radial->seed;
  sys.k = P.charge;
  sys.constant = P.constant;
  return sys;
}

ContinuationResult newton_continuation(const RadialSystem& sys, const ContinuationOptions& opt) {
  ContinuationResult res;
  const int n = sys.grid.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
  {
    NewtonReport rep = newton_solve(sys, 0.0, x, opt.newton);
    if (!rep.converged) {
      res.diagnostic = "seed is not a solution: " + rep.diagnostic;
      return res;
    }
    Eigen::VectorXd p, f;
    RadialSystem::split(x, p, f);
    res.path.push_back(assemble_radial_pair(sys, 0.0, p, f, rep.iterations));
    res.log.push_back({0.0, rep.iterations, rep.residual_scalar, rep.residual_hermitian,
                       res.path.back().metric.scalar_spread(), true, rep.history});
  }
  if (opt.alpha_target == 0) {
    res.reached_target = true;
    return res;
  }
  const double dir = opt.alpha_target > 0 ? 1 : -1;
  double alpha = 0, step = opt.initial_step;
  double prev_alpha = NAN;
  Eigen::VectorXd prev_x;
  int quick = 0;
  for (int k = 0; k < opt.max_steps; ++k) {
    double remaining = std::abs(opt.alpha_target - alpha);
    double a_next = std::abs(step) >= remaining ? opt.alpha_target : alpha + dir * step;
    Eigen::VectorXd xt = x;
    if (prev_x.size() == x.size()) xt = x + (x - prev_x) * ((a_next - alpha) / (alpha - prev_alpha));
    NewtonReport rep = newton_solve(sys, a_next, xt, opt.newton);
    ContinuationRecord rec{a_next, rep.iterations, rep.residual_scalar, rep.residual_hermitian, 0, rep.converged,
                           rep.history};
    if (rep.converged) {
      prev_x = x;
      prev_alpha = alpha;
      x = xt;
      alpha = a_next;
      Eigen::VectorXd p, f;
      RadialSystem::split(x, p, f);
      res.path.push_back(assemble_radial_pair(sys, alpha, p, f, rep.iterations));
      rec.scalar_spread = res.path.back().metric.scalar_spread();
      res.log.push_back(rec);
      if (rep.iterations <= 3 && ++quick >= 2) {
        step *= 1.5;
        quick = 0;
      }
      if (alpha == opt.alpha_target) {
        res.reached_target = true;
        return res;
      }
    } else {
      res.log.push_back(rec);
      step *= 0.5;
      quick = 0;
      if (step < opt.min_step) {
        res.diagnostic = "continuation stalled at alpha = " + std::to_string(alpha) + ": " + rep.diagnostic;
        return res;
      }
    }
  }
  res.diagnostic = "step budget exhausted at alpha = " + std::to_string(alpha);
  return res;
}

SolutionPair rescale_solution(const SolutionPair& P, double beta) {
  RadialSystem sys = radial_system_of(P);
  if (!(P.alpha * beta > 0)) throw InputError("rescaling needs alpha * beta > 0");
  if (beta == P.alpha) return P;
  const double c = beta / P.alpha;
  RadialSystem out = sys;
  out.grid = sys.grid.scaled(std::sqrt(c));
  out.seed.b = sys.seed.b / c;
  return assemble_radial_pair(out, beta, P.metric.p, P.radial->f);
}

namespace {

// natural cubic spline through (x_i, y_i)
struct Spline {
  Eigen::VectorXd x, y, m;  // m: second derivatives

  Spline(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) : x(xs), y(ys) {
    const Eigen::Index n = x.size();
    m = Eigen::VectorXd::Zero(n);
    if (n < 3) return;
    Eigen::VectorXd a(n), b(n), c(n), d(n);
    a.setZero();
    c.setZero();
    b.setOnes();
    d.setZero();
    for (Eigen::Index i = 1; i < n - 1; ++i) {
      double h0 = x(i) - x(i - 1), h1 = x(i + 1) - x(i);
      a(i) = h0 / 6;
      b(i) = (h0 + h1) / 3;
      c(i) = h1 / 6;
      d(i) = (y(i + 1) - y(i)) / h1 - (y(i) - y(i - 1)) / h0;
    }
    for (Eigen::Index i = 1; i < n; ++i) {
      double w = a(i) / b(i - 1);
      b(i) -= w * c(i - 1);
      d(i) -= w * d(i - 1);
    }
    m(n - 1) = d(n - 1) / b(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) m(i) = (d(i) - c(i) * m(i + 1)) / b(i);
  }

  double operator()(double t) const {
    const Eigen::Index n = x.size();
    Eigen::Index k = std::upper_bound(x.data(), x.data() + n, t) - x.data() - 1;
    k = std::clamp<Eigen::Index>(k, 0, n - 2);
    double h = x(k + 1) - x(k), A = (x(k + 1) - t) / h, B = (t - x(k)) / h;
    return A * y(k) + B * y(k + 1) + ((A * A * A - A) * m(k) + (B * B * B - B) * m(k + 1)) * h * h / 6;
  }
};

Eigen::VectorXd resample_profile(const RadialGrid& from, const Eigen::VectorXd& v, const RadialGrid& to) {
  // even in r about the origin: spline in s
  Eigen::VectorXd s = from.r.cwiseProduct(from.r);
  Spline sp(s, v);
  const double s_last = s(s.size() - 1), v_last = v(v.size() - 1);
  Eigen::VectorXd out(to.size());
  for (int i = 0; i < to.size(); ++i) {
    double t = to.s(i);
    out(i) = t > s_last ? v_last * s_last / t : sp(t);
  }
  return out;
}

}  // namespace

SolutionPair resample(const SolutionPair& P, const RadialGrid& grid) {
  RadialSystem sys = radial_system_of(P);
  const RadialGrid& old = sys.grid;
  Eigen::VectorXd p = resample_profile(old, P.metric.p, grid);
  Eigen::VectorXd f = resample_profile(old, P.radial->f, grid);
  sys.grid = grid;
  return assemble_radial_pair(sys, P.alpha, p, f);
}

double radial_charge(const SolutionPair& P) {
  RadialSystem sys = radial_system_of(P);
  const RadialGrid& g = sys.grid;
  Eigen::VectorXd w = g.volume_weights();
  Eigen::VectorXd dens(g.size());
  for (int i = 0; i < g.size(); ++i) {
    auto c = radial_curvature_at(g, sys.seed, P.radial->f, i);
    dens(i) = (8 * c.B * c.B - 16 * c.A1 * c.A2) * w(i);  // *tr(F^F) times g1 g2
  }
  return tree_sum(dens) / (8 * M_PI * M_PI);
}

RadialFieldData radial_field_data(const SolutionPair& P) {
  RadialSystem sys = radial_system_of(P);
  const int n = sys.grid.size();
  RadialFieldData d;
  d.F2.resize(n);
  d.lambdaF2.resize(n);
  d.F02.resize(n);
  d.lambda2_wedge.resize(n);
  for (int i = 0; i < n; ++i) {
    QForm F = radial_curvature_form(radial_curvature_at(sys.grid, sys.seed, P.radial->f, i));
    MetricPoint m = P.metric.metric_point(i);
    Quatd l = lambda(F, m);
    d.F2(i) = norm2(F, m);
    d.lambdaF2(i) = pair(l, l);
    d.F02(i) = norm2_02(F, m);
    d.lambda2_wedge(i) = lambda2_wedge(F, m);
  }
  return d;
}

CymReport cym_functional(const SolutionPair& P, double c) {
  CymReport rep;
  rep.flagged = 2 * c >= 1;
  const KahlerData& K = P.metric;
  const double a0 = P.coupling.alpha0, a1 = P.coupling.alpha1;
  Eigen::VectorXd F2, L2, F02, w;
  Eigen::VectorXd S = K.scalar;
  if (P.radial) {
    if (c != 0) throw InputError("on C2 the functional is finite for c = 0 only");
    auto d = radial_field_data(P);
    F2 = d.F2;
    L2 = d.lambdaF2;
    F02 = d.F02;
    w = K.vol;
    const int n = K.size();
    const double r = K.grid->r_max();
    // |F|^2 <= C r^-8 beyond the grid
    const double Ct = d.F2(n - 1) * std::pow(r, 8);
    rep.tail_bound = std::abs(2 * a1) * 2 * M_PI * M_PI * Ct / (4 * std::pow(r, 4));
  } else if (P.bundle) {
    auto lam = line_bundle_lambda(K, *P.bundle);
    const int n = K.size();
    F2.resize(n);
    for (int i = 0; i < n; ++i) F2(i) = lam[std::size_t(i)].squaredNorm();
    L2 = F2;
    F02 = Eigen::VectorXd::Zero(n);
    w = K.vol;
  } else {
    throw InputError("functional needs a radial pair or line bundle data with quadrature weights");
  }
  Eigen::VectorXd X = a0 * S - 2 * a1 * F2;
  rep.value = weighted_sum(w, X.cwiseProduct(X)) + 2 * a1 * weighted_sum(w, F2);
  Eigen::VectorXd Xc = X.array() - c;
  rep.first = weighted_sum(w, Xc.cwiseProduct(Xc));
  rep.lambda = 2 * a1 * (1 - 2 * c) * weighted_sum(w, L2);
  rep.f02 = 2 * a1 * (1 - 2 * c) * 4 * weighted_sum(w, F02);
  rep.topological = weighted_sum(w, F2 - L2 - 4 * F02);
  const double vol = tree_sum(w);
  const double shat = P.radial ? 0.0 : weighted_sum(w, S) / vol;
  rep.constant = (P.radial ? 0.0 : (2 * c * a0 * shat - c * c) * vol) + 2 * a1 * (1 - 2 * c) * rep.topological;
  return rep;
}

DecoupledCheck riemann_surface_decoupled_check(const KahlerData& K, const LineBundleData& L,
                                               const std::vector<CouplingConstants>& couplings) {
  if (K.n != 1) throw InputError("decoupled check needs complex dimension one");
  auto lam = line_bundle_lambda(K, L);
  Eigen::Matrix2cd z = matched_center(K, L);
  const int n = K.size();
  const double shat = K.average_scalar();
  DecoupledCheck out;
  out.hermitian.resize(n);
  out.scalar = K.scalar.array() - shat;
  for (int i = 0; i < n; ++i) {
    double m = 0;
    for (std::size_t j = 0; j < L.degrees.size(); ++j)
      m = std::max(m, std::abs(lam[std::size_t(i)](Eigen::Index(j)) - z(Eigen::Index(j), Eigen::Index(j))));
    out.hermitian(i) = m;
  }
  SolutionPair P;
  P.metric = K;
  P.bundle = L;
  for (const auto& cc : couplings) {
    P.coupling = cc;
    ResidualPair r = coupled_residual(P, z, cc.alpha0 * shat);
    for (int i = 0; i < n; ++i) {
      out.agreement = std::max(out.agreement, std::abs(r.scalar(i) - cc.alpha0 * out.scalar(i)));
      double h = 0;
      for (std::size_t j = 0; j < L.degrees.size(); ++j)
        h = std::max(h, std::abs(r.hermitian[std::size_t(i)](Eigen::Index(j), Eigen::Index(j))));
      out.agreement = std::max(out.agreement, std::abs(h - out.hermitian(i)));
    }
  }
  return out;
}

RForm real_two_form(const Eigen::Matrix2cd& H) {
  const C I(0, 1);
  std::array<std::array<C, 4>, 4> a{};
  auto add = [&](int u, int v, C x) {
    a[std::size_t(u)][std::size_t(v)] += x;
    a[std::size_t(v)][std::size_t(u)] -= x;
  };
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      C m = I * H(j, k);
      int p = 2 * j, q = 2 * j + 1, r = 2 * k, s = 2 * k + 1;
      add(p, r, m);
      add(p, s, -I * m);
      add(q, r, I * m);
      add(q, s, m);
    }
  RForm w;
  for (int k = 0; k < 6; ++k) w.c[std::size_t(k)] = a[std::size_t(kPairs[k][0])][std::size_t(kPairs[k][1])].real();
  return w;
}

namespace {

void require_surface(const KahlerData& K, const CurvatureField& F) {
  if (K.n != 2) throw InputError("EYM residual needs a complex surface");
  if (K.size() != 1 && std::size_t(K.size()) != F.size()) throw InputError("metric and curvature sample counts differ");
}

RForm pairing_form(const Quatd& l, const QForm& F) {
  RForm out;
  for (int k = 0; k < 6; ++k) out.c[std::size_t(k)] = pair(l, F.c[std::size_t(k)]);
  return out;
}

}  // namespace

std::vector<RForm> eym_residual(const KahlerData& K, const CurvatureField& F, double alpha0, double alpha1, double c1,
                                double c2) {
  require_surface(K, F);
  std::vector<RForm> out(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) {
    int k = K.size() == 1 ? 0 : int(i);
    MetricPoint m = K.metric_point(k);
    RForm omega = kahler_form(m);
    RForm rho = real_two_form(K.ricci[std::size_t(k)]);
    const QForm& Fi = F.values[i];
    RForm lff = (wedge_coefficient(Fi, Fi) / m.sqrt_det) * omega;
    RForm right = 2.0 * pairing_form(lambda(Fi, m), Fi) - lff - c2 * omega;
    out[i] = alpha0 * (rho - c1 * omega) - alpha1 * right;
  }
  return out;
}

std::vector<RForm> eym_reduction_defect(const KahlerData& K, const CurvatureField& F) {
  require_surface(K, F);
  std::vector<RForm> out(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) {
    int k = K.size() == 1 ? 0 : int(i);
    MetricPoint m = K.metric_point(k);
    RForm omega = kahler_form(m);
    const QForm& Fi = F.values[i];
    RForm lff = (wedge_coefficient(Fi, Fi) / m.sqrt_det) * omega;
    out[i] = 2.0 * pairing_form(lambda(Fi, m), Fi) - lff - norm2(Fi, m) * omega;
  }
  return out;
}

}  // namespace kym
