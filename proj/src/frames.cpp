#include "geomflow/frames.hpp"

#include <cmath>

#include "geomflow/error.hpp"
#include "geomflow/spectral.hpp"

namespace geomflow {

namespace {

Eigen::Vector3d at(const std::array<GridFunction, 3>& v, std::size_t j) { return {v[0][j], v[1][j], v[2][j]}; }

void put(std::array<GridFunction, 3>& v, std::size_t j, const Eigen::Vector3d& p) {
  for (int i = 0; i < 3; ++i) v[i][j] = p(i);
}

struct PslPieces {
  GridFunction a, da, c, dc, u, u1;
};

PslPieces psl_pieces(const ProjectiveCurve& u, double lambda) {
  const GridFunction u1 = u.derivative(1);
  if (!(u1.min() > 0.0)) throw Error(ErrorKind::DegenerateCurve, "PSL(2) frame needs u' > 0", u1.min());
  const GridFunction u2 = u.derivative(2);
  GridFunction a = map(u1, [](double v) { return 1.0 / std::sqrt(v); });
  GridFunction c = 0.5 * (u2 / u1) + (-lambda);
  GridFunction da = derivative(a, 1);
  GridFunction dc = derivative(c, 1);
  return {std::move(a), std::move(da), std::move(c), std::move(dc), u.values(), u1};
}

}  // namespace

FrenetFrame frenet_frame(const EuclideanCurve& c) {
  const auto d1 = c.derivative(1);
  const auto d2 = c.derivative(2);
  const std::size_t n = c.grid.n();
  FrenetFrame f{{GridFunction(c.grid), GridFunction(c.grid), GridFunction(c.grid)},
                {GridFunction(c.grid), GridFunction(c.grid), GridFunction(c.grid)},
                {GridFunction(c.grid), GridFunction(c.grid), GridFunction(c.grid)}};
  for (std::size_t j = 0; j < n; ++j) {
    const Eigen::Vector3d a = at(d1, j);
    const Eigen::Vector3d cr = a.cross(at(d2, j));
    const double s = a.norm();
    if (!(cr.norm() > 1e-8 * s * s * s))
      throw Error(ErrorKind::FrameDegenerate, "curvature vanishes; Frenet frame undefined", cr.norm());
    const Eigen::Vector3d t = a / s;
    const Eigen::Vector3d b = cr.normalized();
    put(f.T, j, t);
    put(f.B, j, b);
    put(f.N, j, b.cross(t));
  }
  return f;
}

double frenet_residual(const EuclideanCurve& c, const FrenetFrame& f, const EuclideanInvariants& inv) {
  const GridFunction speed = c.speed();
  auto ds = [&](const std::array<GridFunction, 3>& v) {
    return std::array<GridFunction, 3>{derivative(v[0]) / speed, derivative(v[1]) / speed,
                                       derivative(v[2]) / speed};
  };
  const auto dT = ds(f.T), dN = ds(f.N), dB = ds(f.B);
  double r = 0.0;
  for (std::size_t j = 0; j < c.grid.n(); ++j) {
    const double k = inv.kappa[j], t = inv.tau[j];
    r = std::max(r, (at(dT, j) - k * at(f.N, j)).cwiseAbs().maxCoeff());
    r = std::max(r, (at(dN, j) + k * at(f.T, j) - t * at(f.B, j)).cwiseAbs().maxCoeff());
    r = std::max(r, (at(dB, j) + t * at(f.N, j)).cwiseAbs().maxCoeff());
  }
  return r;
}

PSL2Frame psl2_frame(const ProjectiveCurve& u, double lambda) {
  const PslPieces p = psl_pieces(u, lambda);
  std::vector<Eigen::MatrixXd> rho(u.grid.n());
  for (std::size_t j = 0; j < rho.size(); ++j) {
    Eigen::Matrix2d lo, dg, up;
    lo << 1.0, 0.0, p.c[j], 1.0;
    dg << p.a[j], 0.0, 0.0, 1.0 / p.a[j];
    up << 1.0, -p.u[j], 0.0, 1.0;
    rho[j] = lo * dg * up;
  }
  return {MatrixField(u.grid, std::move(rho), lambda), lambda};
}

MatrixField psl2_frame_derivative(const ProjectiveCurve& u, double lambda) {
  const PslPieces p = psl_pieces(u, lambda);
  std::vector<Eigen::MatrixXd> out(u.grid.n());
  for (std::size_t j = 0; j < out.size(); ++j) {
    Eigen::Matrix2d lo, dg, up, dlo, ddg, dup;
    const double a = p.a[j];
    lo << 1.0, 0.0, p.c[j], 1.0;
    dg << a, 0.0, 0.0, 1.0 / a;
    up << 1.0, -p.u[j], 0.0, 1.0;
    dlo << 0.0, 0.0, p.dc[j], 0.0;
    ddg << p.da[j], 0.0, 0.0, -p.da[j] / (a * a);
    dup << 0.0, -p.u1[j], 0.0, 0.0;
    out[j] = dlo * dg * up + lo * ddg * up + lo * dg * dup;
  }
  return MatrixField(u.grid, std::move(out), lambda);
}

NormalizationResiduals psl2_normalization(const PSL2Frame& frame, const ProjectiveCurve& u) {
  const GridFunction v = u.values();
  const GridFunction u1 = u.derivative(1);
  const GridFunction u2 = u.derivative(2);
  NormalizationResiduals r;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const auto& m = frame.rho.values[j];
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double den = c * v[j] + d;
    const double det = a * d - b * c;
    // Prolonged action of w = (a u + b)/(c u + d) with the group element frozen.
    const double w0 = (a * v[j] + b) / den;
    const double w1 = det * u1[j] / (den * den);
    const double w2 = det * (u2[j] / (den * den) - 2.0 * c * u1[j] * u1[j] / (den * den * den));
    r.det = std::max(r.det, std::abs(det - 1.0));
    r.value = std::max(r.value, std::abs(w0));
    r.first = std::max(r.first, std::abs(w1 - 1.0));
    r.second = std::max(r.second, std::abs(w2 - 2.0 * frame.lambda));
  }
  return r;
}

SerretFrenetMatrix psl2_serret_frenet(const PSL2Frame& frame, const ProjectiveCurve& u) {
  const double lambda = frame.lambda;
  const GridFunction s = schwarzian(u);
  std::vector<Eigen::MatrixXd> k(u.grid.n());
  for (std::size_t j = 0; j < k.size(); ++j) {
    Eigen::Matrix2d m;
    m << -lambda, -1.0, 0.5 * s[j] + lambda * lambda, lambda;
    k[j] = m;
  }
  SerretFrenetMatrix out{MatrixField(u.grid, std::move(k), lambda), "psl2", 0.0};
  const MatrixField drho = psl2_frame_derivative(u, lambda);
  for (std::size_t j = 0; j < drho.size(); ++j)
    out.residual = std::max(out.residual,
                            (drho.values[j] - out.K.values[j] * frame.rho.values[j]).cwiseAbs().maxCoeff());
  if (out.residual > 1e-4)
    throw Error(ErrorKind::Inconsistency, "rho_x = K rho fails; discretization is not resolving u", out.residual);
  return out;
}

MatrixField euclidean_frame(const EuclideanCurve& c) {
  const FrenetFrame f = frenet_frame(c);
  std::vector<Eigen::MatrixXd> rho(c.grid.n(), Eigen::MatrixXd::Zero(4, 4));
  for (std::size_t j = 0; j < rho.size(); ++j) {
    auto& m = rho[j];
    m(0, 0) = 1.0;
    m.block<3, 1>(1, 0) = c.point(j);
    m.block<3, 1>(1, 1) = at(f.T, j);
    m.block<3, 1>(1, 2) = at(f.N, j);
    m.block<3, 1>(1, 3) = at(f.B, j);
  }
  return MatrixField(c.grid, std::move(rho));
}

SerretFrenetMatrix euclidean_serret_frenet(const EuclideanCurve& c) {
  const EuclideanInvariants inv = curvature_torsion(c);
  std::vector<Eigen::MatrixXd> k(c.grid.n(), Eigen::MatrixXd::Zero(4, 4));
  for (std::size_t j = 0; j < k.size(); ++j) {
    auto& m = k[j];
    m(1, 0) = 1.0;
    m(1, 2) = -inv.kappa[j];
    m(2, 1) = inv.kappa[j];
    m(2, 3) = -inv.tau[j];
    m(3, 2) = inv.tau[j];
  }
  SerretFrenetMatrix out{MatrixField(c.grid, std::move(k)), "euclidean", 0.0};
  const MatrixField rho = euclidean_frame(c);
  const MatrixField drho = derivative(rho);
  for (std::size_t j = 0; j < rho.size(); ++j)
    out.residual = std::max(out.residual, (drho.values[j] - rho.values[j] * out.K.values[j]).cwiseAbs().maxCoeff());
  return out;
}

}  // namespace geomflow
