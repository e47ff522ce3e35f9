#include "kym/weighted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace kym {

void WeightedNormSpec::validate() const {
  if (!(r0 > 0)) throw InputError("weighted norm needs r0 > 0");
  if (!(beta > 0 && beta < 1)) throw InputError("Holder exponent must lie in (0, 1)");
  if (k < 0 || k > 2) throw InputError("derivative order must be 0, 1 or 2");
}

namespace {

Eigen::VectorXd nonuniform_d1(const Eigen::VectorXd& r, const Eigen::VectorXd& v) {
  const Eigen::Index n = r.size();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index a = std::clamp<Eigen::Index>(i - 1, 0, n - 3);
    auto w = d1_weights(r(i), r(a), r(a + 1), r(a + 2));
    d(i) = w[0] * v(a) + w[1] * v(a + 1) + w[2] * v(a + 2);
  }
  return d;
}

}  // namespace

WeightedNorm weighted_sup_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& phi, const WeightedNormSpec& spec) {
  spec.validate();
  const Eigen::Index n = r.size();
  if (n != phi.size() || n < 3) throw InputError("weighted norm needs matching samples");
  if (r(0) > spec.r0 * (1 + 1e-12)) throw InputError("samples do not reach down to r0");
  std::vector<Eigen::VectorXd> der{phi};
  for (int j = 1; j <= spec.k; ++j) der.push_back(nonuniform_d1(r, der.back()));

  WeightedNorm out;
  const int annuli = int(std::floor(std::log2(r(n - 1) / spec.r0))) + 1;
  out.annulus_max.assign(std::size_t(std::max(annuli, 1)), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r(i) < spec.r0) continue;
    int a = std::min(int(std::floor(std::log2(r(i) / spec.r0))), annuli - 1);
    double m = 0;
    for (int j = 0; j <= spec.k; ++j) m = std::max(m, std::pow(r(i), j) * std::abs(der[std::size_t(j)](i)));
    double v = std::pow(r(i), -spec.delta) * m;
    auto& slot = out.annulus_max[std::size_t(a)];
    slot = std::max(slot, v);
    if (i + 1 < n && r(i + 1) < 2 * r(i)) {
      // rescaled difference quotient of the top derivative between neighbours
      double q = std::abs(der[std::size_t(spec.k)](i + 1) - der[std::size_t(spec.k)](i)) /
                 std::pow(r(i + 1) - r(i), spec.beta);
      out.holder = std::max(out.holder, std::pow(r(i), spec.k + spec.beta - spec.delta) * q);
    }
  }
  // growing: the last three annulus maxima grow at least like r^0.02
  const auto& am = out.annulus_max;
  if (am.size() >= 3) {
    std::size_t m = am.size();
    const double rate = std::exp2(0.02);
    out.growing = am[m - 1] > rate * am[m - 2] && am[m - 2] > rate * am[m - 3];
  }
  out.value = out.growing ? std::numeric_limits<double>::infinity() : *std::max_element(am.begin(), am.end());
  return out;
}

WeightedNorm weighted_sup_norm(const ConnectionField& A, const WeightedNormSpec& spec) {
  const std::size_t n = A.size();
  std::vector<std::pair<double, double>> rv(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0;
    for (const auto& q : A.values[i]) m = std::max(m, std::sqrt(q.norm2()));
    rv[i] = {std::sqrt(A.points[i].norm2()), m};
  }
  std::sort(rv.begin(), rv.end());
  // one value per radius: keep the largest
  std::vector<std::pair<double, double>> merged;
  for (const auto& p : rv) {
    if (!merged.empty() && p.first == merged.back().first)
      merged.back().second = std::max(merged.back().second, p.second);
    else
      merged.push_back(p);
  }
  Eigen::VectorXd r(Eigen::Index(merged.size())), v(Eigen::Index(merged.size()));
  for (std::size_t i = 0; i < merged.size(); ++i) {
    r(Eigen::Index(i)) = merged[i].first;
    v(Eigen::Index(i)) = merged[i].second;
  }
  WeightedNormSpec s = spec;
  s.k = 0;
  return weighted_sup_norm(r, v, s);
}

bool certify_decay(ConnectionField& A, double r0) {
  WeightedNormSpec spec;
  spec.delta = -1;
  spec.r0 = r0;
  WeightedNorm w = weighted_sup_norm(A, spec);
  if (!std::isfinite(w.value)) return false;
  A.decay_certificate = w.value;
  return true;
}

std::vector<std::pair<double, double>> indicial_roots(std::vector<double> eigenvalues) {
  std::sort(eigenvalues.begin(), eigenvalues.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(eigenvalues.size());
  for (double l : eigenvalues) {
    if (!(l >= 0)) throw InputError("indicial roots need nonnegative eigenvalues");
    double q = std::sqrt(1 + l);
    double up = l / (1 + q);  // -1 + q without cancellation
    out.emplace_back(up, -2 - up);
  }
  return out;
}

std::vector<double> sphere_spectrum_table(int count, int n) {
  if (count < 1 || n < 4 * count) throw InputError("spectrum table needs n >= 4 count");
  // cell centres chi_i, faces chi_{i +- 1/2}, u = 0 flux through the poles
  const double h = M_PI / n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd m(n);
  for (int i = 0; i < n; ++i) {
    double c = (i + 0.5) * h;
    m(i) = std::sin(c) * std::sin(c) * h;
    for (int side : {-1, 1}) {
      int j = i + side;
      if (j < 0 || j >= n) continue;
      double f = std::sin(c + 0.5 * side * h);
      double k = f * f / h;
      A(i, i) += k;
      A(i, j) -= k;
    }
  }
  // symmetric form M^-1/2 A M^-1/2
  Eigen::VectorXd s = m.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd B = s.asDiagonal() * A * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + count);
  return out;
}

RadialOperator assemble_radial_laplacian(const RadialGrid& grid, double lambda, const InstantonProfile& profile) {
  if (!(lambda >= 0)) throw InputError("sector eigenvalue must be nonnegative");
  RadialOperator op;
  op.grid = grid;
  op.lambda = lambda;
  op.profile = profile;
  op.inner = grid.origin_regular() ? RadialOperator::Inner::regular : RadialOperator::Inner::dirichlet;
  const int n = grid.size();
  op.V.resize(n);
  op.W.resize(n);
  op.lower = Eigen::VectorXd::Zero(n);
  op.diag = Eigen::VectorXd::Zero(n);
  op.upper = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double r = grid.r(i), t = profile.t(r);
    op.V(i) = (lambda + (profile.kind == InstantonProfile::Kind::flat ? 0.0 : 8 * (1 - t) * (1 - t))) / (r * r);
    double a = grid.rh(i), b = grid.rh(i + 1);
    op.W(i) = 0.25 * (b * b * b * b - a * a * a * a);
  }
  for (int i = 0; i < n; ++i) {
    if (op.fixed(i)) {
      op.diag(i) = 1;
      continue;
    }
    double kr = std::pow(grid.rh(i + 1), 3) / (grid.r(i + 1) - grid.r(i));
    double kl = i == 0 ? 0.0 : std::pow(grid.rh(i), 3) / (grid.r(i) - grid.r(i - 1));
    op.diag(i) = (kr + kl) / op.W(i) + op.V(i);
    op.upper(i) = -kr / op.W(i);
    op.lower(i) = -kl / op.W(i);
  }
  return op;
}

Eigen::VectorXd RadialOperator::apply(const Eigen::VectorXd& u) const {
  const int n = size();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double v = diag(i) * u(i);
    if (i > 0) v += lower(i) * u(i - 1);
    if (i < n - 1) v += upper(i) * u(i + 1);
    out(i) = v;
  }
  return out;
}

Eigen::VectorXd RadialOperator::solve(const Eigen::VectorXd& rhs) const {
  // Thomas algorithm; the operator is diagonally dominant for V >= 0
  const int n = size();
  Eigen::VectorXd c(n), d(n), x(n);
  c(0) = upper(0) / diag(0);
  d(0) = rhs(0) / diag(0);
  for (int i = 1; i < n; ++i) {
    double m = diag(i) - lower(i) * c(i - 1);
    if (m == 0) throw NumericalError("singular radial operator");
    c(i) = i < n - 1 ? upper(i) / m : 0.0;
    d(i) = (rhs(i) - lower(i) * d(i - 1)) / m;
  }
  x(n - 1) = d(n - 1);
  for (int i = n - 2; i >= 0; --i) x(i) = d(i) - c(i) * x(i + 1);
  return x;
}

double RadialOperator::lowest_eigenvalue() const {
  std::vector<int> free;
  for (int i = 0; i < size(); ++i)
    if (!fixed(i)) free.push_back(i);
  const int m = int(free.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
  // W L is symmetric; scale by W^-1/2 on both sides
  for (int a = 0; a < m; ++a) {
    int i = free[std::size_t(a)];
    B(a, a) = diag(i);
    if (a + 1 < m && free[std::size_t(a + 1)] == i + 1) {
      double off = upper(i) * std::sqrt(W(i) / W(i + 1));
      B(a, a + 1) = off;
      B(a + 1, a) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

DecayProbe decay_probe(const RadialOperator& op, const Eigen::VectorXd& rhs, double max_residual) {
  const int n = op.size();
  if (rhs.size() != n) throw InputError("right-hand side does not match the operator");
  DecayProbe p;
  if (rhs.cwiseAbs().maxCoeff() == 0) {
    p.trivial = true;
    return p;
  }
  int last = 0;
  for (int i = 0; i < n; ++i)
    if (rhs(i) != 0) last = i;
  const double support = op.grid.r(last), r_max = op.grid.r_max();
  if (r_max < 10 * support) throw InputError("far boundary must lie beyond ten times the support radius");
  Eigen::VectorXd b = rhs;
  for (int i = 0; i < n; ++i)
    if (op.fixed(i)) b(i) = 0;
  Eigen::VectorXd u = op.solve(b);
  const double hi = r_max / 10, lo = std::exp(std::log(support) + (2.0 / 3) * (std::log(hi) - std::log(support)));
  p.window_lo = lo;
  p.window_hi = hi;
  std::vector<double> x, y;
  for (int i = 0; i < n; ++i) {
    double r = op.grid.r(i);
    if (r >= lo && r <= hi && u(i) != 0) {
      x.push_back(std::log(r));
      y.push_back(std::log(std::abs(u(i))));
    }
  }
  if (x.size() < 3) throw InputError("fit window holds fewer than three nodes");
  Eigen::MatrixXd A(Eigen::Index(x.size()), 2);
  Eigen::VectorXd Y(Eigen::Index(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    A(Eigen::Index(i), 0) = 1;
    A(Eigen::Index(i), 1) = x[i];
    Y(Eigen::Index(i)) = y[i];
  }
  Eigen::Vector2d c = A.colPivHouseholderQr().solve(Y);
  p.exponent = c(1);
  p.fit_residual = std::sqrt((A * c - Y).squaredNorm() / double(x.size()));
  p.flagged = p.fit_residual > max_residual;
  return p;
}

}  // namespace kym
