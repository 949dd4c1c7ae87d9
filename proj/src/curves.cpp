#include "geomflow/curves.hpp"

// pchip.hpp calls isnan unqualified; <math.h> puts it in the global namespace.
#include <math.h>
#include <boost/math/interpolators/pchip.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

#include "geomflow/error.hpp"
#include "geomflow/spectral.hpp"

namespace geomflow {

namespace {

void require_finite(const GridFunction& f, const char* what) {
  if (!f.all_finite()) throw Error(ErrorKind::InvalidInput, std::string(what) + ": non-finite sample");
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

// ---- Euclidean ---------------------------------------------------------------

EuclideanCurve::EuclideanCurve(std::array<GridFunction, 3> c, Unchecked) : grid(c[0].grid), coords(std::move(c)) {
  for (const auto& f : coords) require_same_grid(grid, f.grid, "EuclideanCurve");
}

EuclideanCurve::EuclideanCurve(std::array<GridFunction, 3> c) : EuclideanCurve(std::move(c), Unchecked{}) {
  for (const auto& f : coords) require_finite(f, "EuclideanCurve");
  const double m = speed().min();
  if (!(m > 1e-8)) throw Error(ErrorKind::DegenerateCurve, "curve is not regular (speed vanishes)", m);
}

EuclideanCurve EuclideanCurve::sample(const PeriodicGrid& g, const std::function<Eigen::Vector3d(double)>& f) {
  std::array<GridFunction, 3> c{GridFunction(g), GridFunction(g), GridFunction(g)};
  for (std::size_t j = 0; j < g.n(); ++j) {
    const Eigen::Vector3d p = f(g.point(j));
    for (int i = 0; i < 3; ++i) c[i][j] = p(i);
  }
  return EuclideanCurve(std::move(c));
}

std::array<GridFunction, 3> EuclideanCurve::derivative(int order) const {
  return {geomflow::derivative(coords[0], order), geomflow::derivative(coords[1], order),
          geomflow::derivative(coords[2], order)};
}

GridFunction EuclideanCurve::speed() const {
  const auto d = derivative(1);
  GridFunction s(grid);
  for (std::size_t j = 0; j < grid.n(); ++j) s[j] = std::hypot(d[0][j], d[1][j], d[2][j]);
  return s;
}

// ---- Projective --------------------------------------------------------------

ProjectiveCurve::ProjectiveCurve(double m, GridFunction p, Unchecked)
    : grid(p.grid), slope(m), periodic(std::move(p)) {}

ProjectiveCurve::ProjectiveCurve(double m, GridFunction p) : ProjectiveCurve(m, std::move(p), Unchecked{}) {
  require_finite(periodic, "ProjectiveCurve");
  if (!std::isfinite(slope)) throw Error(ErrorKind::InvalidInput, "ProjectiveCurve: non-finite slope");
  const double m1 = derivative(1).min();
  if (!(m1 > 1e-8)) throw Error(ErrorKind::DegenerateCurve, "u' must stay positive", m1);
}

GridFunction ProjectiveCurve::values() const {
  GridFunction u = periodic;
  for (std::size_t j = 0; j < grid.n(); ++j) u[j] += slope * grid.point(j);
  return u;
}

GridFunction ProjectiveCurve::derivative(int order) const {
  if (order < 1) throw Error(ErrorKind::UnsupportedOrder, "ProjectiveCurve::derivative needs order >= 1", order);
  GridFunction d = geomflow::derivative(periodic, order);
  if (order == 1) d += slope;
  return d;
}

// ---- Star --------------------------------------------------------------------

StarCurve::StarCurve(std::array<GridFunction, 2> p, Eigen::Matrix2d g, Unchecked)
    : grid(p[0].grid), periodic(std::move(p)), generator(g) {
  require_same_grid(grid, periodic[1].grid, "StarCurve");
}

StarCurve::StarCurve(std::array<GridFunction, 2> p, Eigen::Matrix2d g) : StarCurve(std::move(p), g, Unchecked{}) {
  for (const auto& f : periodic) require_finite(f, "StarCurve");
  if (std::abs(generator.trace()) > 1e-12)
    throw Error(ErrorKind::InvalidInput, "monodromy generator must be trace-free", generator.trace());
  const GridFunction w = wronskian();
  const double m = std::min(std::abs(w.min()), std::abs(w.max()));
  if (!(m > 1e-8) || w.min() * w.max() <= 0.0)
    throw Error(ErrorKind::DegenerateCurve, "det(gamma, gamma') vanishes", m);
}

Eigen::Matrix2d StarCurve::twist(double x) const {
  if (generator.isZero(0.0)) return Eigen::Matrix2d::Identity();
  return (x * generator).exp();
}

std::array<GridFunction, 2> StarCurve::derivative(int order) const {
  if (order < 0 || order > 4) throw Error(ErrorKind::UnsupportedOrder, "StarCurve::derivative order 0..4", order);
  // gamma^(j) = E sum_i C(j,i) G^i gamma~^(j-i), using E' = G E = E G.
  std::vector<std::array<GridFunction, 2>> jets;
  for (int i = 0; i <= order; ++i)
    jets.push_back({geomflow::derivative(periodic[0], i), geomflow::derivative(periodic[1], i)});
  std::array<GridFunction, 2> out{GridFunction(grid), GridFunction(grid)};
  Eigen::Matrix2d gpow = Eigen::Matrix2d::Identity();
  std::vector<Eigen::Matrix2d> powers;
  for (int i = 0; i <= order; ++i, gpow = gpow * generator) powers.push_back(gpow);
  for (std::size_t j = 0; j < grid.n(); ++j) {
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (int i = 0; i <= order; ++i) {
      const auto& v = jets[order - i];
      acc += binomial(order, i) * powers[i] * Eigen::Vector2d(v[0][j], v[1][j]);
    }
    acc = twist(grid.point(j)) * acc;
    out[0][j] = acc(0);
    out[1][j] = acc(1);
  }
  return out;
}

GridFunction StarCurve::wronskian() const {
  const auto g0 = derivative(0);
  const auto g1 = derivative(1);
  return g0[0] * g1[1] - g0[1] * g1[0];
}

bool StarCurve::normalized(double tol) const { return (wronskian() + (-1.0)).max_abs() <= tol; }

// ---- Lagrangian --------------------------------------------------------------

LagrangianCurve::LagrangianCurve(Eigen::MatrixXd m, std::vector<Eigen::MatrixXd> p, PeriodicGrid g, Unchecked)
    : grid(g), slope(std::move(m)), periodic(std::move(p)) {
  if (periodic.size() != grid.n())
    throw Error(ErrorKind::ShapeMismatch, "LagrangianCurve sample count", double(periodic.size()));
  for (const auto& a : periodic)
    if (a.rows() != slope.rows() || a.cols() != slope.cols() || slope.rows() != slope.cols())
      throw Error(ErrorKind::ShapeMismatch, "LagrangianCurve matrices must be square and equally sized");
}

LagrangianCurve::LagrangianCurve(Eigen::MatrixXd m, std::vector<Eigen::MatrixXd> p, PeriodicGrid g)
    : LagrangianCurve(std::move(m), std::move(p), g, Unchecked{}) {
  auto symmetric = [](const Eigen::MatrixXd& a) {
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());
  };
  if (!slope.allFinite() || !symmetric(slope)) throw Error(ErrorKind::InvalidInput, "slope must be symmetric");
  for (const auto& a : periodic)
    if (!a.allFinite() || !symmetric(a)) throw Error(ErrorKind::InvalidInput, "samples must be finite and symmetric");
  const auto r = check_generic(*this);
  if (!r.pass) throw Error(ErrorKind::DegenerateCurve, "u' is not positive definite", r.margin);
}

GridFunction LagrangianCurve::entry(std::size_t i, std::size_t j) const {
  GridFunction f(grid);
  for (std::size_t k = 0; k < grid.n(); ++k) f[k] = periodic[k](Eigen::Index(i), Eigen::Index(j));
  return f;
}

Eigen::MatrixXd LagrangianCurve::value(std::size_t node) const { return slope * grid.point(node) + periodic[node]; }

std::vector<Eigen::MatrixXd> LagrangianCurve::derivative(int order) const {
  if (order < 1) throw Error(ErrorKind::UnsupportedOrder, "LagrangianCurve::derivative needs order >= 1", order);
  const Eigen::Index m = slope.rows();
  std::vector<Eigen::MatrixXd> out(grid.n(), Eigen::MatrixXd::Zero(m, m));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      const GridFunction d = geomflow::derivative(entry(i, j), order);
      for (std::size_t k = 0; k < grid.n(); ++k) out[k](i, j) = out[k](j, i) = d[k];
    }
  if (order == 1)
    for (auto& a : out) a += slope;
  return out;
}

// ---- shared ------------------------------------------------------------------

const char* geometry_name(const Curve& c) noexcept {
  static constexpr const char* names[] = {"euclidean", "projective", "star", "lagrangian"};
  return names[c.index()];
}

const PeriodicGrid& grid_of(const Curve& c) noexcept {
  return std::visit([](const auto& v) -> const PeriodicGrid& { return v.grid; }, c);
}

EuclideanCurve reparametrize_arclength(const EuclideanCurve& c) {
  const GridFunction s = c.speed();
  if (!(s.min() > 1e-8)) throw Error(ErrorKind::DegenerateCurve, "cannot reparametrize a singular curve", s.min());
  const auto& g = c.grid;
  const std::size_t n = g.n();
  const Antiderivative ell = antiderivative(s, 0.0);
  const double total = ell.slope * g.length();
  GridFunction wiggle = ell.values;  // periodic part of the cumulative length
  for (std::size_t j = 0; j < n; ++j) wiggle[j] -= ell.slope * g.point(j);

  // Monotone cubic seed for the inverse map, then Newton on the spectral length.
  std::vector<double> lengths(n + 1), params(n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    lengths[j] = ell.values[j];
    params[j] = g.point(j);
  }
  lengths[n] = total;
  params[n] = g.length();
  boost::math::interpolators::pchip<std::vector<double>> inverse(std::move(lengths), std::move(params));

  std::vector<double> x(n), target(n);
  for (std::size_t j = 0; j < n; ++j) {
    target[j] = total * double(j) / double(n);
    x[j] = inverse(target[j]);
  }
  for (int iter = 0; iter < 30; ++iter) {
    const auto w = evaluate_at(wiggle, x);
    const auto sp = evaluate_at(s, x);
    double step = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = (ell.slope * x[j] + w[j] - target[j]) / sp[j];
      x[j] -= dx;
      step = std::max(step, std::abs(dx));
    }
    if (step < 1e-15 * g.length()) break;
  }

  const PeriodicGrid out_grid(n, total);
  std::array<GridFunction, 3> out{GridFunction(out_grid), GridFunction(out_grid), GridFunction(out_grid)};
  for (int i = 0; i < 3; ++i) out[i].values = evaluate_at(c.coords[i], x);
  return EuclideanCurve(std::move(out));
}

StarCurve projective_to_star(const ProjectiveCurve& u) {
  const GridFunction u1 = u.derivative(1);
  if (!(u1.min() > 0.0)) throw Error(ErrorKind::DegenerateCurve, "u' must be positive for the star lift", u1.min());
  const GridFunction y = map(u1, [](double v) { return 1.0 / std::sqrt(v); });
  Eigen::Matrix2d gen = Eigen::Matrix2d::Zero();
  gen(1, 0) = u.slope;
  return StarCurve({y, y * u.periodic}, gen);
}

ProjectiveCurve star_to_projective(const StarCurve& c) {
  const auto gamma = c.derivative(0);
  GridFunction u = gamma[1] / gamma[0];
  const Eigen::Vector2d g0(gamma[0][0], gamma[1][0]);
  const Eigen::Vector2d gl = c.monodromy() * g0;
  const double slope = (gl(1) / gl(0) - g0(1) / g0(0)) / c.grid.length();
  for (std::size_t j = 0; j < c.grid.n(); ++j) u[j] -= slope * c.grid.point(j);
  return ProjectiveCurve(slope, std::move(u));
}

GenericityReport check_generic(const EuclideanCurve& c, double tol) {
  const double m = c.speed().min();
  return {"euclidean", "min_speed", m, tol, m > tol};
}

GenericityReport check_generic(const ProjectiveCurve& c, double tol) {
  const double m = c.derivative(1).min();
  return {"projective", "min_u1", m, tol, m > tol};
}

GenericityReport check_generic(const StarCurve& c, double tol) {
  const double m = c.wronskian().min();
  return {"star", "min_det_gamma_gamma1", m, tol, m > tol};
}

GenericityReport check_generic(const LagrangianCurve& c, double tol) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& a : c.derivative(1)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()(0));
  }
  return {"lagrangian", "min_eig_u1", m, tol, m > tol};
}

GenericityReport check_generic(const Curve& c, double tol) {
  return std::visit([tol](const auto& v) { return check_generic(v, tol); }, c);
}

}  // namespace geomflow
