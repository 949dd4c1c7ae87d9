#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "geomflow/curves.hpp"
#include "geomflow/error.hpp"
#include "geomflow/invariants.hpp"
#include "geomflow/spectral.hpp"
#include "support.hpp"

using namespace geomflow;
using testing::sup_diff;

namespace {

// Closed-form derivatives of the torus helix, order 1..3.
std::array<Eigen::Vector3d, 3> torus_helix_jet(double t, double w) {
  const double r = 3.0 + 0.6 * std::cos(5 * t), r1 = -3.0 * std::sin(5 * t), r2 = -15.0 * std::cos(5 * t),
               r3 = 75.0 * std::sin(5 * t);
  const double c = std::cos(t), s = std::sin(t);
  return {Eigen::Vector3d(r1 * c - r * s, r1 * s + r * c, 3 * std::cos(5 * t) - 2 * w * std::sin(2 * t)),
          Eigen::Vector3d(r2 * c - 2 * r1 * s - r * c, r2 * s + 2 * r1 * c - r * s,
                          -15 * std::sin(5 * t) - 4 * w * std::cos(2 * t)),
          Eigen::Vector3d(r3 * c - 3 * r2 * s - 3 * r1 * c + r * s, r3 * s + 3 * r2 * c - 3 * r1 * s - r * c,
                          -75 * std::cos(5 * t) + 8 * w * std::sin(2 * t))};
}

// S(u) for u = x + eps sin x, by hand.
double schwarzian_of_wave(double x, double eps) {
  const double u1 = 1 + eps * std::cos(x), u2 = -eps * std::sin(x), u3 = -eps * std::cos(x);
  return u3 / u1 - 1.5 * (u2 / u1) * (u2 / u1);
}

// Lagrangian Schwarzian by dense linear algebra from the exact jet.
Eigen::Matrix2d dense_schwarzian(const Eigen::Matrix2d& u1, const Eigen::Matrix2d& u2, const Eigen::Matrix2d& u3) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(u1);
  const Eigen::Matrix2d r = es.operatorInverseSqrt();
  return r * (u3 - 1.5 * u2 * u1.inverse() * u2) * r.transpose();
}

}  // namespace

TEST_CASE("curvature and torsion of a circle and an ellipse") {
  for (double r : {0.5, 1.0, 3.0}) {
    const auto inv = curvature_torsion(testing::circle(64, r));
    CHECK(sup_diff(inv.kappa, [r](double) { return 1.0 / r; }) < 1e-12);
    CHECK(inv.tau.max_abs() < 1e-12);
  }
  const auto e = EuclideanCurve::sample(testing::circle_grid(128), [](double t) {
    return Eigen::Vector3d(2 * std::cos(t), std::sin(t), 0.0);
  });
  const auto inv = curvature_torsion(e);
  CHECK(inv.tau.max_abs() < 1e-10);
  CHECK(inv.kappa.min() > 0.0);
  // Ellipse curvature a b / (a^2 sin^2 + b^2 cos^2)^{3/2}.
  CHECK(sup_diff(inv.kappa, [](double t) {
          return 2.0 / std::pow(4 * std::sin(t) * std::sin(t) + std::cos(t) * std::cos(t), 1.5);
        }) < 1e-10);
}

TEST_CASE("curvature and torsion against closed-form derivatives") {
  for (double w : {0.0, 0.15}) {
    const auto inv = curvature_torsion(testing::torus_helix(256, w));
    double dk = 0.0, dt = 0.0;
    for (std::size_t j = 0; j < 256; ++j) {
      const auto d = torus_helix_jet(inv.kappa.grid.point(j), w);
      const Eigen::Vector3d cr = d[0].cross(d[1]);
      dk = std::max(dk, std::abs(inv.kappa[j] - cr.norm() / std::pow(d[0].norm(), 3)));
      dt = std::max(dt, std::abs(inv.tau[j] - cr.dot(d[2]) / cr.squaredNorm()));
    }
    CHECK(dk < 1e-8);
    CHECK(dt < 1e-8);
  }
}

TEST_CASE("arc-length formulas agree with the general ones") {
  const auto c = reparametrize_arclength(testing::torus_helix(256));
  const auto inv = curvature_torsion(c);
  const auto d2 = c.derivative(2);
  GridFunction k(c.grid);
  for (std::size_t j = 0; j < k.size(); ++j) k[j] = std::hypot(d2[0][j], d2[1][j], d2[2][j]);
  CHECK(sup_diff(inv.kappa, k) < 1e-6);
}

TEST_CASE("straight segments have no torsion") {
  const PeriodicGrid g = testing::circle_grid(32);
  // A closed straight segment has to double back, so it is only checked for curvature.
  const std::array<GridFunction, 3> line{GridFunction::sample(g, [](double t) { return std::sin(t); }),
                                         GridFunction(g), GridFunction(g)};
  try {
    curvature_torsion(EuclideanCurve(line, Unchecked{}));
    FAIL("expected frame-degenerate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FrameDegenerate);
  }
}

TEST_CASE("rigid motions leave curvature and torsion unchanged") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal;
  const auto c = testing::torus_helix(256);
  const auto base = curvature_torsion(c);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Matrix3d q =
        Eigen::Quaterniond(normal(rng), normal(rng), normal(rng), normal(rng)).normalized().toRotationMatrix();
    const Eigen::Vector3d shift(normal(rng), normal(rng), normal(rng));
    std::array<GridFunction, 3> moved{GridFunction(c.grid), GridFunction(c.grid), GridFunction(c.grid)};
    for (std::size_t j = 0; j < c.grid.n(); ++j) {
      const Eigen::Vector3d p = q * c.point(j) + shift;
      for (int i = 0; i < 3; ++i) moved[i][j] = p(i);
    }
    const auto inv = curvature_torsion(EuclideanCurve(moved));
    CHECK(sup_diff(inv.kappa, base.kappa) < 1e-8);
    CHECK(sup_diff(inv.tau, base.tau) < 1e-8);
  }
}

TEST_CASE("hasimoto examples") {
  const auto planar = hasimoto(curvature_torsion(testing::circle(32, 2.0)));
  CHECK(planar.eta.max_abs() < 1e-12);
  CHECK(sup_diff(planar.nu, [](double) { return 0.5; }) < 1e-12);

  const PeriodicGrid g = testing::circle_grid(32);
  const auto unit = hasimoto({GridFunction(g, 1.0), GridFunction(g, 1.0)});
  CHECK(unit.phase_slope == doctest::Approx(1.0));
  CHECK(sup_diff(unit.nu, [](double x) { return std::cos(x); }) < 1e-12);
  CHECK(sup_diff(unit.eta, [](double x) { return std::sin(x); }) < 1e-12);

  // Helix values kappa = a/(a^2+b^2), tau = b/(a^2+b^2) with a = 2, b = 1.
  const double kh = 0.4, th = 0.2;
  const auto helix = hasimoto({GridFunction(g, kh), GridFunction(g, th)});
  CHECK(sup_diff(helix.phi.abs(), [&](double) { return kh; }) < 1e-14);
  CHECK(helix.phase_slope == doctest::Approx(th));
  CHECK(sup_diff(helix.eta, [&](double x) { return kh * std::sin(th * x); }) < 1e-12);
}

TEST_CASE("hasimoto modulus and gauge base") {
  const auto inv = curvature_torsion(reparametrize_arclength(testing::torus_helix(256)));
  const auto a = hasimoto(inv);
  CHECK(sup_diff(a.phi.abs(), inv.kappa) < 1e-10);
  const auto b = hasimoto(inv, 1.3);
  CHECK(b.gauge_base == 1.3);
  // Moving the base multiplies Phi by a constant phase.
  const cplx ratio = b.phi.values[0] / a.phi.values[0];
  CHECK(std::abs(std::abs(ratio) - 1.0) < 1e-12);
  double worst = 0.0;
  for (std::size_t j = 0; j < a.phi.size(); ++j) worst = std::max(worst, std::abs(b.phi.values[j] - ratio * a.phi.values[j]));
  CHECK(worst < 1e-10);
}

TEST_CASE("schwarzian examples") {
  CHECK(schwarzian(testing::projective(32, [](double) { return 0.0; })).max_abs() < 1e-14);

  const auto u = testing::projective(64, [](double x) { return 0.1 * std::sin(x); });
  CHECK(sup_diff(schwarzian(u), [](double x) { return schwarzian_of_wave(x, 0.1); }) < 1e-12);

  // Mobius image of u = x on a window where it is defined.
  std::vector<double> window;
  const double h = 0.01;
  for (int i = 0; i <= 200; ++i) {
    const double x = 0.5 + i * h;
    window.push_back((2 * x + 1) / (0.5 * x + 3));
  }
  for (double s : schwarzian_window(window, h)) CHECK(std::abs(s) < 1e-6);

  std::vector<double> expo;
  for (int i = 0; i <= 100; ++i) expo.push_back(std::exp(2.0 * i * 0.01));
  for (double s : schwarzian_window(expo, 0.01)) CHECK(std::abs(s + 2.0) < 1e-8);
}

TEST_CASE("schwarzian is invariant under random Mobius maps") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const auto u = testing::projective(256, [](double x) { return 0.1 * std::sin(x) + 0.05 * std::cos(2 * x); });
  const auto s = schwarzian(u);
  const double h = 0.01;
  std::vector<double> xs;
  for (int i = 0; i <= 150; ++i) xs.push_back(0.5 + i * h);
  const auto periodic_at = evaluate_at(u.periodic, xs);
  const auto s_at = evaluate_at(s, xs);
  for (int trial = 0; trial < 5; ++trial) {
    // a d - b c = 1 with c small enough that c u + d stays away from zero on the window.
    const double c = 0.1 * uni(rng), d = 1.0 + 0.2 * uni(rng), b = uni(rng), a = (1.0 + b * c) / d;
    std::vector<double> gu;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double ui = xs[i] + periodic_at[i];
      gu.push_back((a * ui + b) / (c * ui + d));
    }
    const auto sg = schwarzian_window(gu, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(sg[i] - s_at[i]));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("schwarzian rejects degenerate data") {
  const ProjectiveCurve bad(1.0, testing::sample(32, [](double x) { return 2.0 * std::sin(x); }), Unchecked{});
  CHECK_THROWS_AS(schwarzian(bad), Error);
}

namespace {

LagrangianCurve diagonal_curve(std::size_t n, double ea, double eb) {
  const PeriodicGrid g = testing::circle_grid(n);
  std::vector<Eigen::MatrixXd> p(n, Eigen::MatrixXd::Zero(2, 2));
  for (std::size_t j = 0; j < n; ++j) {
    p[j](0, 0) = ea * std::sin(g.point(j));
    p[j](1, 1) = eb * std::sin(g.point(j));
  }
  return LagrangianCurve(Eigen::MatrixXd::Identity(2, 2), p, g);
}

}  // namespace

TEST_CASE("lagrangian schwarzian reduces blockwise") {
  const auto ls = lagrangian_schwarzian(diagonal_curve(64, 0.1, 0.3));
  double off = 0.0, da = 0.0, db = 0.0;
  for (std::size_t j = 0; j < 64; ++j) {
    const double x = ls.s_d[0].grid.point(j);
    off = std::max(off, std::abs(ls.s_matrix[j](0, 1)));
    da = std::max(da, std::abs(ls.s_matrix[j](0, 0) - schwarzian_of_wave(x, 0.1)));
    db = std::max(db, std::abs(ls.s_matrix[j](1, 1) - schwarzian_of_wave(x, 0.3)));
  }
  CHECK(off < 1e-12);
  CHECK(da < 1e-10);
  CHECK(db < 1e-10);

  const auto flat = lagrangian_schwarzian(diagonal_curve(32, 0.0, 0.0));
  for (const auto& m : flat.s_matrix) CHECK(m.norm() < 1e-13);
}

TEST_CASE("lagrangian schwarzian against a dense oracle") {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> normal;
  const std::size_t n = 64;
  const PeriodicGrid g = testing::circle_grid(n);
  // Symmetric perturbation sum_m A_m cos(m x) + B_m sin(m x), m = 1, 2.
  Eigen::Matrix2d A[2], B[2];
  for (int m = 0; m < 2; ++m) {
    A[m] = 0.04 * Eigen::Matrix2d::NullaryExpr([&](Eigen::Index, Eigen::Index) { return normal(rng); });
    B[m] = 0.04 * Eigen::Matrix2d::NullaryExpr([&](Eigen::Index, Eigen::Index) { return normal(rng); });
    A[m] = (A[m] + A[m].transpose()).eval();
    B[m] = (B[m] + B[m].transpose()).eval();
  }
  auto periodic_derivative = [&](double x, int order) {
    Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
    for (int m = 1; m <= 2; ++m) {
      const double phase = m * x + order * std::numbers::pi / 2;
      s += std::pow(m, order) * (A[m - 1] * std::cos(phase) + B[m - 1] * std::sin(phase));
    }
    return s;
  };
  std::vector<Eigen::MatrixXd> p(n);
  for (std::size_t j = 0; j < n; ++j) p[j] = periodic_derivative(g.point(j), 0);
  Eigen::MatrixXd slope(2, 2);
  slope << 1.0, 0.2, 0.2, 1.5;
  const LagrangianCurve c(slope, p, g);
  const auto ls = lagrangian_schwarzian(c);

  double worst = 0.0, orth = 0.0, diag = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.point(j);
    const Eigen::Matrix2d expected =
        dense_schwarzian(slope + periodic_derivative(x, 1), periodic_derivative(x, 2), periodic_derivative(x, 3));
    worst = std::max(worst, (ls.s_matrix[j] - expected).cwiseAbs().maxCoeff());
    const Eigen::MatrixXd& th = ls.theta[j];
    orth = std::max(orth, (th * th.transpose() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff());
    const Eigen::MatrixXd d = th * ls.s_matrix[j] * th.transpose();
    diag = std::max(diag, std::abs(d(0, 1)));
    CHECK(d(0, 0) == doctest::Approx(ls.s_d[0][j]).epsilon(1e-9));
    CHECK(d(1, 1) == doctest::Approx(ls.s_d[1][j]).epsilon(1e-9));
  }
  CHECK(worst < 1e-10);
  CHECK(orth < 1e-10);
  CHECK(diag < 1e-10);
  CHECK(ls.s_d[0][0] <= ls.s_d[1][0]);
}

TEST_CASE("centro-affine curvature examples") {
  const PeriodicGrid g = testing::circle_grid(64);
  const StarCurve round({GridFunction::sample(g, [](double x) { return std::cos(x); }),
                         GridFunction::sample(g, [](double x) { return std::sin(x); })});
  const auto pc = centroaffine_curvature(round);
  CHECK(sup_diff(pc.p, [](double) { return -1.0; }) < 1e-12);
  CHECK(pc.residual < 1e-12);

  const auto id = centroaffine_curvature(projective_to_star(testing::projective(32, [](double) { return 0.0; })));
  CHECK(id.p.max_abs() < 1e-12);

  const auto u = testing::projective(64, [](double x) { return 0.1 * std::sin(x); });
  const auto wavy = centroaffine_curvature(projective_to_star(u));
  CHECK(sup_diff(wavy.p, [](double x) { return -0.5 * schwarzian_of_wave(x, 0.1); }) < 1e-6);
  CHECK(wavy.residual < 1e-6);
}

TEST_CASE("centro-affine curvature needs a normalized curve") {
  const PeriodicGrid g = testing::circle_grid(32);
  const StarCurve wide({GridFunction::sample(g, [](double x) { return 2 * std::cos(x); }),
                        GridFunction::sample(g, [](double x) { return std::sin(x); })});
  try {
    centroaffine_curvature(wide);
    FAIL("expected precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}
