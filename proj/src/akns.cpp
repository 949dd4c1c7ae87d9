#include "geomflow/akns.hpp"

#include <cmath>

#include "geomflow/error.hpp"
#include "geomflow/finite_difference.hpp"
#include "geomflow/frames.hpp"
#include "geomflow/invariants.hpp"
#include "geomflow/spectral.hpp"

namespace geomflow {

namespace {

double uniform_spacing(const std::vector<double>& times) {
  if (times.size() < 5)
    throw Error(ErrorKind::InsufficientSnapshots, "zero-curvature check needs at least 5 snapshots",
                double(times.size()));
  const double dt = times[1] - times[0];
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * std::abs(dt))
      throw Error(ErrorKind::InvalidInput, "snapshots must be equally spaced in time");
  return dt;
}

MatrixField x_derivative_windowed(const MatrixField& m) {
  MatrixField out(m.grid, m.rows());
  const double dx = m.grid.dx();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.rows(); ++j) {
      const GridFunction e = m.entry(i, j);
      out.set_entry(i, j, GridFunction(m.grid, fd::derivative(e.values, dx, 1)));
    }
  return out;
}

Eigen::MatrixXd euclid_a(double kappa, double tau, double lambda) {
  Eigen::Matrix3d a;
  a << 0.0, kappa, 0.0, -kappa, 0.0, tau - lambda, 0.0, -(tau - lambda), 0.0;
  return a;
}

// Rows T, N, B of the Frenet frame at node j.
Eigen::Matrix3d frenet_rows(const FrenetFrame& f, std::size_t j) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) {
    m(0, i) = f.T[i][j];
    m(1, i) = f.N[i][j];
    m(2, i) = f.B[i][j];
  }
  return m;
}

// Integrates rho_x = A rho across the grid with `sub` RK4 substeps per cell,
// sampling kappa and tau off the nodes through their trigonometric interpolants.
std::vector<Eigen::MatrixXd> integrate_frame(const EuclideanInvariants& inv, double lambda,
                                             const Eigen::Matrix3d& start, int sub) {
  const PeriodicGrid& g = inv.kappa.grid;
  const std::size_t n = g.n();
  const double h = g.dx() / sub;
  std::vector<double> xs;
  for (std::size_t j = 0; j < n; ++j)
    for (int s = 0; s <= 2 * sub; ++s) xs.push_back(g.point(j) + 0.5 * h * s);
  const auto kap = evaluate_at(inv.kappa, xs);
  const auto tau = evaluate_at(inv.tau, xs);
  std::vector<Eigen::MatrixXd> out(n);
  Eigen::Matrix3d rho = start;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = rho;
    const std::size_t base = j * std::size_t(2 * sub + 1);
    for (int s = 0; s < sub; ++s) {
      const std::size_t i0 = base + std::size_t(2 * s);
      const Eigen::Matrix3d a0 = euclid_a(kap[i0], tau[i0], lambda);
      const Eigen::Matrix3d am = euclid_a(kap[i0 + 1], tau[i0 + 1], lambda);
      const Eigen::Matrix3d a1 = euclid_a(kap[i0 + 2], tau[i0 + 2], lambda);
      const Eigen::Matrix3d k1 = a0 * rho;
      const Eigen::Matrix3d k2 = am * (rho + 0.5 * h * k1);
      const Eigen::Matrix3d k3 = am * (rho + 0.5 * h * k2);
      const Eigen::Matrix3d k4 = a1 * (rho + h * k3);
      rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return out;
}

}  // namespace

ZeroCurvature zero_curvature(const AknsPair& pair) {
  if (pair.A.size() != pair.times.size() || pair.B.size() != pair.times.size())
    throw Error(ErrorKind::ShapeMismatch, "pair and time axis differ in length");
  const double dt = uniform_spacing(pair.times);
  ZeroCurvature out;
  for (std::size_t i = 2; i + 2 < pair.times.size(); ++i) {
    const auto& a = pair.A;
    MatrixField at = a[i];
    for (std::size_t k = 0; k < at.size(); ++k)
      at.values[k] = (a[i - 2].values[k] - 8.0 * a[i - 1].values[k] + 8.0 * a[i + 1].values[k] -
                      a[i + 2].values[k]) /
                     (12.0 * dt);
    const MatrixField bx = pair.periodic_in_x ? derivative(pair.B[i]) : x_derivative_windowed(pair.B[i]);
    MatrixField r = at - bx - commutator(pair.B[i], a[i]);
    out.residual = std::max(out.residual, r.max_abs());
    out.fields.push_back(std::move(r));
    out.snapshots.push_back(i);
  }
  return out;
}

AknsPair kdv_akns_pair(const std::vector<ProjectiveCurve>& history, const std::vector<double>& times, double lambda,
                       const KdvPairOptions& opts) {
  if (history.size() != times.size()) throw Error(ErrorKind::ShapeMismatch, "history and times differ in length");
  const double l = lambda;
  AknsPair pair{"sl2", lambda, times, {}, {}, true};
  for (const auto& u : history) {
    const GridFunction q = opts.q_sign * (0.5 * schwarzian(u) + l * l);
    const GridFunction qx = derivative(q, 1);
    const GridFunction qxx = derivative(q, 2);
    std::vector<Eigen::MatrixXd> a(u.grid.n()), b(u.grid.n());
    for (std::size_t j = 0; j < a.size(); ++j) {
      Eigen::Matrix2d am, bm;
      am << -l, -1.0, -q[j], l;
      bm << -0.5 * qx[j] - l * q[j] + 2.0 * l * l * l, -q[j] + 2.0 * l * l,
          0.5 * qxx[j] + l * qx[j] + q[j] * (-q[j] + 2.0 * l * l), 0.5 * qx[j] + l * q[j] - 2.0 * l * l * l;
      a[j] = am;
      b[j] = bm;
    }
    pair.A.emplace_back(u.grid, std::move(a), lambda);
    pair.B.emplace_back(u.grid, std::move(b), lambda);
  }
  return pair;
}

AknsPair kdv_akns_pair(const FlowRun& run, double lambda, const KdvPairOptions& opts) {
  std::vector<ProjectiveCurve> history;
  for (const auto& c : run.snapshots) {
    const auto* u = std::get_if<ProjectiveCurve>(&c);
    if (!u) throw Error(ErrorKind::GeometryMismatch, std::string("KdV pair needs a projective run, got ") +
                                                         geometry_name(c));
    history.push_back(*u);
  }
  return kdv_akns_pair(history, run.times, lambda, opts);
}

AknsPair euclidean_akns_pair(const FlowRun& run, double lambda) {
  const double dt = uniform_spacing(run.times);
  AknsPair pair{"so3", lambda, run.times, {}, {}, lambda == 0.0};
  std::vector<std::vector<Eigen::MatrixXd>> frames;
  for (const auto& c : run.snapshots) {
    const auto* e = std::get_if<EuclideanCurve>(&c);
    if (!e) throw Error(ErrorKind::GeometryMismatch, std::string("Euclidean pair needs a Euclidean run, got ") +
                                                         geometry_name(c));
    const EuclideanInvariants inv = curvature_torsion(*e);
    const FrenetFrame f = frenet_frame(*e);
    std::vector<Eigen::MatrixXd> a(e->grid.n());
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = euclid_a(inv.kappa[j], inv.tau[j], lambda);
    pair.A.emplace_back(e->grid, std::move(a), lambda);
    if (lambda == 0.0) {
      std::vector<Eigen::MatrixXd> rho(e->grid.n());
      for (std::size_t j = 0; j < rho.size(); ++j) rho[j] = frenet_rows(f, j);
      frames.push_back(std::move(rho));
    } else {
      frames.push_back(integrate_frame(inv, lambda, frenet_rows(f, 0), 8));
    }
  }
  // B = rho_t rho^{-1}; one-sided 4th-order stencils at the two ends of the record.
  const std::size_t m = frames.size();
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t start = std::min(i >= 2 ? i - 2 : 0, m - 5);
    const double nodes[5] = {double(start) - double(i), double(start + 1) - double(i), double(start + 2) - double(i),
                             double(start + 3) - double(i), double(start + 4) - double(i)};
    const auto w = fd::fornberg_weights(0.0, nodes, 1);
    std::vector<Eigen::MatrixXd> b(frames[i].size());
    for (std::size_t j = 0; j < b.size(); ++j) {
      Eigen::MatrixXd rt = Eigen::MatrixXd::Zero(3, 3);
      for (int s = 0; s < 5; ++s) rt += w[1][s] * frames[start + std::size_t(s)][j];
      rt /= dt;
      b[j] = rt * frames[i][j].inverse();
    }
    pair.B.emplace_back(pair.A[i].grid, std::move(b), lambda);
  }
  return pair;
}

MatrixField gauge_transform(const MatrixField& k, const Eigen::MatrixXd& g) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (g.rows() != Eigen::Index(k.rows()) || !lu.isInvertible())
    throw Error(ErrorKind::SingularOperator, "gauge matrix is singular or of the wrong size");
  const Eigen::MatrixXd gi = lu.inverse();
  MatrixField out = k;
  for (auto& v : out.values) v = g * v * gi;
  return out;
}

MatrixField gauge_transform(const MatrixField& k, const MatrixField& g) {
  require_same_grid(k.grid, g.grid, "gauge_transform");
  const MatrixField gx = derivative(g);
  MatrixField out = k;
  for (std::size_t j = 0; j < k.size(); ++j) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(g.values[j]);
    if (!lu.isInvertible()) throw Error(ErrorKind::SingularOperator, "gauge field is singular at a node", double(j));
    const Eigen::MatrixXd gi = lu.inverse();
    out.values[j] = gx.values[j] * gi + g.values[j] * k.values[j] * gi;
  }
  return out;
}

AknsPair gauge_transform(const AknsPair& pair, const Eigen::MatrixXd& g) {
  AknsPair out = pair;
  for (auto& a : out.A) a = gauge_transform(a, g);
  for (auto& b : out.B) b = gauge_transform(b, g);
  return out;
}

}  // namespace geomflow
