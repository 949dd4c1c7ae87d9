#include <doctest.h>

#include <cmath>

#include "geomflow/akns.hpp"
#include "geomflow/error.hpp"
#include "geomflow/frames.hpp"
#include "geomflow/invariants.hpp"
#include "geomflow/spectral.hpp"
#include "support.hpp"

using namespace geomflow;
using testing::sup_diff;

namespace {

MatrixField constant_field(const PeriodicGrid& g, const Eigen::MatrixXd& m) {
  return MatrixField(g, std::vector<Eigen::MatrixXd>(g.n(), m));
}

double field_diff(const MatrixField& a, const MatrixField& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, (a.values[j] - b.values[j]).cwiseAbs().maxCoeff());
  return m;
}

// Run of the lambda realization that matches q = -(S/2 + lambda^2), with snapshots every `spacing`.
FlowRun matched_run(const ProjectiveCurve& u0, double lambda, double spacing, int snapshots) {
  FlowSpec spec;
  spec.kind = FlowKind::SchwarzianKdVLambda;
  spec.lambda = lambda;
  spec.lambda_exponent = 2.0;
  const int sub = int(std::ceil(spacing / default_dt(spec, u0)));
  return run_flow(spec, u0, spacing / sub, sub * (snapshots - 1), sub);
}

KdvPairOptions matched() {
  KdvPairOptions o;
  o.q_sign = -1.0;
  return o;
}

ProjectiveCurve wave() {
  return testing::projective(64, [](double x) { return 0.1 * std::sin(x) + 0.05 * std::cos(2 * x); });
}

}  // namespace

TEST_CASE("constant commuting pair is flat") {
  const PeriodicGrid g = testing::circle_grid(16);
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1, 0, 0, -1;
  b << 2, 0, 0, -2;
  AknsPair p;
  p.algebra = "sl2";
  for (int i = 0; i < 5; ++i) {
    p.times.push_back(0.1 * i);
    p.A.push_back(constant_field(g, a));
    p.B.push_back(constant_field(g, b));
  }
  const auto z = zero_curvature(p);
  CHECK(z.residual < 1e-14);
  CHECK(z.snapshots == std::vector<std::size_t>{2});

  p.times.pop_back();
  p.A.pop_back();
  p.B.pop_back();
  try {
    zero_curvature(p);
    FAIL("expected insufficient snapshots");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientSnapshots);
  }
}

TEST_CASE("stationary curve gives a constant flat pair") {
  const auto line = testing::projective(32, [](double) { return 0.0; });
  const auto run = matched_run(line, 0.5, 1e-3, 5);
  const auto pair = kdv_akns_pair(run, 0.5, matched());
  CHECK(zero_curvature_residual(pair) < 1e-12);
  for (const auto& a : pair.A) CHECK(sup_diff(a.entry(1, 0), [](double) { return 0.25; }) < 1e-14);
}

TEST_CASE("lambda = 0 pair matches the gauged Serret-Frenet matrix") {
  const auto u = wave();
  const auto pair = kdv_akns_pair({u}, {0.0}, 0.0, matched());
  const auto k = psl2_serret_frenet(psl2_frame(u, 0.0), u);
  CHECK(field_diff(pair.A[0], k.K) < 1e-14);

  const double lambda = 0.6;
  const auto pl = kdv_akns_pair({u}, {0.0}, lambda, matched());
  const auto kl = psl2_serret_frenet(psl2_frame(u, lambda), u);
  Eigen::MatrixXd g(2, 2);
  g << 1, 0, lambda, 1;
  // Both sides reduce to the lambda = 0 matrix after the constant gauge.
  CHECK(field_diff(gauge_transform(kl.K, g), k.K) < 1e-13);
  CHECK(std::abs(pl.A[0].values[0](0, 0) + lambda) < 1e-15);
}

TEST_CASE("KdV pair is flat on matched realization runs") {
  const auto u0 = wave();
  for (double lambda : {0.3, 0.7}) {
    const auto run = matched_run(u0, lambda, 5e-4, 7);
    REQUIRE(run.status == FlowRun::Status::Completed);
    const auto pair = kdv_akns_pair(run, lambda, matched());
    CHECK(zero_curvature_residual(pair) < 1e-5);
    for (const auto& a : pair.A)
      for (const auto& m : a.values) CHECK(std::abs(m.trace()) < 1e-12);

    AknsPair bad = pair;
    for (auto& b : bad.B)
      for (auto& m : b.values) m = -m;
    CHECK(zero_curvature_residual(bad) > 0.1);
  }
}

TEST_CASE("residual is conjugated by a constant gauge") {
  const auto u0 = wave();
  const auto run = matched_run(u0, 0.3, 5e-4, 5);
  const auto pair = kdv_akns_pair(run, 0.3, matched());
  Eigen::MatrixXd g(2, 2);
  g << 1.0, 0.3, 0.3, 1.9;
  const auto zc = zero_curvature(pair);
  const auto zg = zero_curvature(gauge_transform(pair, g));
  for (std::size_t i = 0; i < zc.fields.size(); ++i)
    CHECK(field_diff(zg.fields[i], gauge_transform(zc.fields[i], g)) < 1e-12);
}

TEST_CASE("gauge transforms") {
  const PeriodicGrid g = testing::circle_grid(32);
  MatrixField k(g, 2);
  k.set_entry(0, 1, GridFunction::sample(g, [](double x) { return std::sin(x); }));
  k.set_entry(1, 0, GridFunction::sample(g, [](double x) { return std::cos(x); }));
  CHECK(field_diff(gauge_transform(k, Eigen::MatrixXd::Identity(2, 2)), k) == 0.0);
  CHECK(field_diff(gauge_transform(k, constant_field(g, Eigen::MatrixXd::Identity(2, 2))), k) < 1e-15);

  Eigen::MatrixXd singular(2, 2);
  singular << 1, 2, 2, 4;
  CHECK_THROWS_AS(gauge_transform(k, singular), Error);

  // g = diag(e^{sin x}, 1): g_x g^{-1} = diag(cos x, 0), and conjugation scales
  // the off-diagonal entries by e^{+-sin x}.
  std::vector<Eigen::MatrixXd> gv(g.n(), Eigen::MatrixXd::Identity(2, 2));
  for (std::size_t j = 0; j < g.n(); ++j) gv[j](0, 0) = std::exp(std::sin(g.point(j)));
  const auto t = gauge_transform(k, MatrixField(g, gv));
  CHECK(sup_diff(t.entry(0, 0), [](double x) { return std::cos(x); }) < 1e-12);
  CHECK(sup_diff(t.entry(0, 1), [](double x) { return std::exp(std::sin(x)) * std::sin(x); }) < 1e-12);
  CHECK(sup_diff(t.entry(1, 0), [](double x) { return std::exp(-std::sin(x)) * std::cos(x); }) < 1e-12);
  CHECK(t.entry(1, 1).max_abs() < 1e-15);
}

TEST_CASE("euclidean pair along a vortex filament run") {
  FlowSpec vf;
  vf.kind = FlowKind::VortexFilament;
  auto residual = [&](std::size_t n, int stride, double lambda) {
    const auto c = reparametrize_arclength(testing::torus_helix(n));
    const auto run = run_flow(vf, c, 2e-4, 4 * stride, stride);
    REQUIRE(run.status == FlowRun::Status::Completed);
    const auto pair = euclidean_akns_pair(run, lambda);
    CHECK(pair.algebra == "so3");
    for (const auto& a : pair.A)
      for (const auto& m : a.values) CHECK((m + m.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    return zero_curvature_residual(pair);
  };
  // Periodic frames: the floor is the time stencil on B.
  const double coarse = residual(192, 10, 0.0), fine = residual(192, 5, 0.0);
  CHECK(fine < coarse / 6.0);
  CHECK(fine < 1e-6);
  // Transported frames are not periodic in x; B_x falls back to finite differences.
  const double rough = residual(96, 10, 0.4), smooth = residual(192, 10, 0.4);
  MESSAGE("euclidean pair residual at lambda 0.4: " << rough << " -> " << smooth);
  CHECK(smooth < rough / 16.0);
}
