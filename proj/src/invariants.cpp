#include "geomflow/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geomflow/error.hpp"
#include "geomflow/finite_difference.hpp"
#include "geomflow/spectral.hpp"

namespace geomflow {

namespace {

Eigen::Vector3d at(const std::array<GridFunction, 3>& v, std::size_t j) { return {v[0][j], v[1][j], v[2][j]}; }

Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.eigenvalues()(0) <= 0.0)
    throw Error(ErrorKind::DegenerateCurve, "u' is not positive definite", es.eigenvalues()(0));
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

EuclideanInvariants curvature_torsion(const EuclideanCurve& c) {
  const auto d1 = c.derivative(1);
  const auto d2 = c.derivative(2);
  const auto d3 = c.derivative(3);
  GridFunction kappa(c.grid), tau(c.grid);
  for (std::size_t j = 0; j < c.grid.n(); ++j) {
    const Eigen::Vector3d a = at(d1, j), b = at(d2, j), e = at(d3, j);
    const Eigen::Vector3d cr = a.cross(b);
    const double speed = a.norm();
    kappa[j] = cr.norm() / (speed * speed * speed);
    if (!(kappa[j] > 1e-8))
      throw Error(ErrorKind::FrameDegenerate, "curvature vanishes; torsion undefined", kappa[j]);
    tau[j] = cr.dot(e) / cr.squaredNorm();
  }
  return {std::move(kappa), std::move(tau)};
}

NaturalInvariants hasimoto(const EuclideanInvariants& inv, double base) {
  if (!(inv.kappa.min() > 1e-8))
    throw Error(ErrorKind::FrameDegenerate, "Hasimoto map needs kappa > 0", inv.kappa.min());
  const Antiderivative theta = antiderivative(inv.tau, 0.0);
  // Shift the primitive so that it vanishes at the base point.
  double offset = 0.0;
  if (base != 0.0) {
    GridFunction wiggle = theta.values;
    for (std::size_t j = 0; j < wiggle.size(); ++j) wiggle[j] -= theta.slope * wiggle.grid.point(j);
    const double xb[] = {base};
    offset = evaluate_at(wiggle, xb)[0] + theta.slope * base;
  }
  std::vector<cplx> phi(inv.kappa.size());
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = std::polar(inv.kappa[j], theta.values[j] - offset);
  ComplexGridFunction z(inv.kappa.grid, std::move(phi));
  return {z.real(), z.imag(), z, base, theta.slope};
}

GridFunction schwarzian(const ProjectiveCurve& u) {
  const GridFunction u1 = u.derivative(1);
  if (!(u1.min() > 0.0)) throw Error(ErrorKind::DegenerateCurve, "Schwarzian needs u' > 0", u1.min());
  const GridFunction u2 = u.derivative(2);
  const GridFunction u3 = u.derivative(3);
  GridFunction s(u.grid);
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double r = u2[j] / u1[j];
    s[j] = u3[j] / u1[j] - 1.5 * r * r;
  }
  return s;
}

std::vector<double> schwarzian_window(std::span<const double> samples, double spacing) {
  const auto u1 = fd::derivative(samples, spacing, 1);
  const auto u2 = fd::derivative(samples, spacing, 2);
  const auto u3 = fd::derivative(samples, spacing, 3);
  std::vector<double> s(samples.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!(u1[j] != 0.0)) throw Error(ErrorKind::DegenerateCurve, "Schwarzian needs u' != 0", u1[j]);
    const double r = u2[j] / u1[j];
    s[j] = u3[j] / u1[j] - 1.5 * r * r;
  }
  return s;
}

LagrangianSchwarzian lagrangian_schwarzian(const LagrangianCurve& c) {
  const std::size_t n = c.grid.n();
  const Eigen::Index m = Eigen::Index(c.dim());
  const auto u1 = c.derivative(1);
  const auto u2 = c.derivative(2);
  const auto u3 = c.derivative(3);

  LagrangianSchwarzian out;
  out.s_matrix.resize(n);
  out.theta.resize(n);
  out.s_d.assign(std::size_t(m), GridFunction(c.grid));

  std::vector<int> perm(static_cast<std::size_t>(m));
  Eigen::MatrixXd prev;  // columns: eigenvectors chosen at the previous node
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::MatrixXd r = inverse_sqrt_spd(u1[k]);
    const Eigen::MatrixXd inner = u3[k] - 1.5 * u2[k] * u1[k].llt().solve(u2[k]);
    Eigen::MatrixXd s = r * inner * r;
    s = 0.5 * (s + s.transpose());
    out.s_matrix[k] = s;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const auto& vals = es.eigenvalues();
    const Eigen::MatrixXd& vecs = es.eigenvectors();
    for (Eigen::Index i = 1; i < m; ++i)
      if (vals(i) - vals(i - 1) < 1e-10) out.near_degenerate = true;

    std::iota(perm.begin(), perm.end(), 0);
    if (k > 0) {
      // Order by maximal total overlap with the previous eigenvectors: exhaustive
      // for small blocks, greedy beyond that.
      const Eigen::MatrixXd overlap = (prev.transpose() * vecs).cwiseAbs();
      if (m <= 6) {
        double best = -1.0;
        std::vector<int> trial = perm;
        do {
          double score = 0.0;
          for (Eigen::Index i = 0; i < m; ++i) score += overlap(i, trial[std::size_t(i)]);
          if (score > best) {
            best = score;
            perm = trial;
          }
        } while (std::next_permutation(trial.begin(), trial.end()));
      } else {
        std::vector<bool> used(std::size_t(m), false);
        for (Eigen::Index i = 0; i < m; ++i) {
          Eigen::Index arg = -1;
          for (Eigen::Index j = 0; j < m; ++j)
            if (!used[std::size_t(j)] && (arg < 0 || overlap(i, j) > overlap(i, arg))) arg = j;
          used[std::size_t(arg)] = true;
          perm[std::size_t(i)] = int(arg);
        }
      }
    }
    Eigen::MatrixXd cols(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::VectorXd v = vecs.col(perm[std::size_t(i)]);
      // Sign: continuity with the previous node; at x = 0 the largest component is positive.
      if (k > 0) {
        if (prev.col(i).dot(v) < 0.0) v = -v;
      } else {
        Eigen::Index arg;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
      }
      cols.col(i) = v;
      out.s_d[std::size_t(i)][k] = vals(perm[std::size_t(i)]);
    }
    out.theta[k] = cols.transpose();
    prev = cols;
  }
  return out;
}

CentroAffineInvariant centroaffine_curvature(const StarCurve& c, double tol) {
  const GridFunction w = c.wronskian();
  const double dev = (w + (-1.0)).max_abs();
  if (dev > tol) throw Error(ErrorKind::Precondition, "star curve is not normalized (det(gamma, gamma') != 1)", dev);
  const auto g0 = c.derivative(0);
  const auto g1 = c.derivative(1);
  const auto g2 = c.derivative(2);
  // gamma'' = p gamma, and det(gamma', gamma) = -1 picks out p = det(gamma'', gamma').
  GridFunction p = g2[0] * g1[1] - g2[1] * g1[0];
  double residual = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j)
    residual = std::max({residual, std::abs(g2[0][j] - p[j] * g0[0][j]), std::abs(g2[1][j] - p[j] * g0[1][j])});
  return {std::move(p), residual};
}

}  // namespace geomflow
