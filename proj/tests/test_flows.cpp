#include <doctest.h>

#include <cmath>

#include "geomflow/error.hpp"
#include "geomflow/flows.hpp"
#include "geomflow/frames.hpp"
#include "geomflow/invariants.hpp"
#include "geomflow/spectral.hpp"
#include "support.hpp"

using namespace geomflow;
using testing::sup_diff;

namespace {

FlowSpec flow(FlowKind kind) {
  FlowSpec s;
  s.kind = kind;
  return s;
}

std::vector<GridFunction> schwarzian_of(const Curve& c) { return {schwarzian(std::get<ProjectiveCurve>(c))}; }

std::vector<GridFunction> kappa_tau_of(const Curve& c) {
  auto inv = curvature_torsion(std::get<EuclideanCurve>(c));
  return {inv.kappa, inv.tau};
}

GridFunction kdv_rhs(const GridFunction& k) {
  const auto j = jet(k, 3);
  return j[3] + 3.0 * j[0] * j[1];
}

double rel_sup(const GridFunction& a, const GridFunction& ref) { return (a - ref).max_abs() / ref.max_abs(); }

ProjectiveCurve wave(std::size_t n) { return testing::projective(n, [](double x) { return 0.1 * std::sin(x); }); }

}  // namespace

TEST_CASE("flow catalog") {
  CHECK(flow_names().size() == 7);
  for (const auto& name : flow_names()) CHECK(FlowSpec::from_name(name).name() == name);
  CHECK(std::string(flow_geometry(FlowKind::PinkallStar)) == "star");
  try {
    FlowSpec::from_name("heat");
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("vector field examples") {
  const auto line = testing::projective(32, [](double) { return 0.0; });
  CHECK(flow_vector_field(flow(FlowKind::SchwarzianKdV), line)[0].max_abs() < 1e-14);

  for (double r : {1.0, 2.5}) {
    const auto c = testing::circle(32, r);
    const auto vf = flow_vector_field(flow(FlowKind::VortexFilament), c);
    CHECK(vf[0].max_abs() < 1e-12);
    CHECK(vf[1].max_abs() < 1e-12);
    CHECK(sup_diff(vf[2], [r](double) { return 1.0 / r; }) < 1e-12);
  }

  const auto c = reparametrize_arclength(testing::torus_helix(128));
  FlowSpec hg = flow(FlowKind::EuclideanHG);
  hg.h = [](const EuclideanInvariants& inv) { return GridFunction(inv.kappa.grid); };
  hg.g = [](const EuclideanInvariants& inv) { return inv.kappa; };
  const auto a = flow_vector_field(hg, c);
  const auto b = flow_vector_field(flow(FlowKind::VortexFilament), c);
  for (int i = 0; i < 3; ++i) CHECK(sup_diff(a[i], b[i]) < 1e-14);

  CHECK_THROWS_AS(flow_vector_field(flow(FlowKind::VortexFilament), line), Error);
}

TEST_CASE("euclidean-hg tangential part is h T + (h'/kappa) N") {
  const auto c = reparametrize_arclength(testing::torus_helix(256));
  FlowSpec hg = flow(FlowKind::EuclideanHG);
  hg.h = [](const EuclideanInvariants& inv) { return inv.tau; };
  hg.g = [](const EuclideanInvariants& inv) { return GridFunction(inv.kappa.grid); };
  const auto v = flow_vector_field(hg, c);
  const auto f = frenet_frame(c);
  const auto inv = curvature_torsion(c);
  const GridFunction hn = derivative(inv.tau) / inv.kappa;
  double t = 0.0, n = 0.0, b = 0.0;
  for (std::size_t j = 0; j < c.grid.n(); ++j) {
    const Eigen::Vector3d vj(v[0][j], v[1][j], v[2][j]);
    t = std::max(t, std::abs(vj.dot(Eigen::Vector3d(f.T[0][j], f.T[1][j], f.T[2][j])) - inv.tau[j]));
    n = std::max(n, std::abs(vj.dot(Eigen::Vector3d(f.N[0][j], f.N[1][j], f.N[2][j])) - hn[j]));
    b = std::max(b, std::abs(vj.dot(Eigen::Vector3d(f.B[0][j], f.B[1][j], f.B[2][j]))));
  }
  CHECK(t < 1e-12);
  CHECK(n < 1e-6);
  CHECK(b < 1e-12);
}

TEST_CASE("schwarzian KdV leaves u = x fixed") {
  const auto line = testing::projective(64, [](double) { return 0.0; });
  const auto run = run_flow(flow(FlowKind::SchwarzianKdV), line, 1e-3, 200, 50);
  CHECK(run.status == FlowRun::Status::Completed);
  CHECK(run.snapshots.size() == 5);
  CHECK(sup_diff(std::get<ProjectiveCurve>(run.snapshots.back()).values(), line.values()) < 1e-12);
}

TEST_CASE("vortex filament moves a circle rigidly along its axis") {
  const auto c0 = testing::circle(64, 1.0);
  const auto run = run_flow(flow(FlowKind::VortexFilament), c0, 1e-3, 500, 100);
  REQUIRE(run.status == FlowRun::Status::Completed);
  for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
    const auto& c = std::get<EuclideanCurve>(run.snapshots[s]);
    for (int i = 0; i < 3; ++i) {
      const GridFunction d = c.coords[i] - c0.coords[i];
      CHECK(d.max() - d.min() < 1e-10);
    }
    // kappa B = e3 for the unit circle, so it travels at unit speed.
    CHECK(c.coords[2].mean() == doctest::Approx(run.times[s]).epsilon(1e-10));
    CHECK(sup_diff(run.histories.at("kappa")[s], [](double) { return 1.0; }) < 1e-6);
    CHECK(run.histories.at("tau")[s].max_abs() < 1e-6);
  }
}

TEST_CASE("lagrangian flow keeps diagonal data diagonal") {
  const PeriodicGrid g = testing::circle_grid(64);
  std::vector<Eigen::MatrixXd> p(64, Eigen::MatrixXd::Zero(2, 2));
  for (std::size_t j = 0; j < 64; ++j) {
    p[j](0, 0) = 0.1 * std::sin(g.point(j));
    p[j](1, 1) = 0.08 * std::cos(2 * g.point(j));
  }
  const LagrangianCurve c0(Eigen::MatrixXd::Identity(2, 2), p, g);
  const FlowSpec spec = flow(FlowKind::LagrangianSKdV);
  const auto run = run_flow(spec, c0, default_dt(spec, c0), 300, 100);
  REQUIRE(run.status == FlowRun::Status::Completed);
  for (const auto& snap : run.snapshots) CHECK(std::get<LagrangianCurve>(snap).entry(0, 1).max_abs() < 1e-8);
  CHECK(run.histories.count("s0") == 1);
  CHECK(run.histories.count("s1") == 1);
}

TEST_CASE("pinkall star flow keeps centro-affine arc length") {
  const auto star0 = projective_to_star(wave(64));
  const FlowSpec spec = flow(FlowKind::PinkallStar);
  const auto run = run_flow(spec, star0, default_dt(spec, star0), 400, 100);
  REQUIRE(run.status == FlowRun::Status::Completed);
  for (const auto& snap : run.snapshots) CHECK((std::get<StarCurve>(snap).wronskian() + (-1.0)).max_abs() < 1e-6);
}

TEST_CASE("oracle: schwarzian KdV induces KdV") {
  const auto u = wave(64);
  OracleOptions opts;
  opts.micro_dt = 1e-6;
  const auto o = invariantization_oracle(flow(FlowKind::SchwarzianKdV), u, schwarzian_of, opts);
  const auto k = schwarzian(u);
  CHECK(rel_sup(o.rates[0], kdv_rhs(k)) < 1e-4);
  CHECK(o.error_estimate < 1e-3);
}

TEST_CASE("oracle: vortex filament curvature evolution") {
  const auto c = reparametrize_arclength(testing::torus_helix(256));
  FlowSpec hg = flow(FlowKind::EuclideanHG);
  hg.h = [](const EuclideanInvariants& inv) { return GridFunction(inv.kappa.grid); };
  hg.g = [](const EuclideanInvariants& inv) { return inv.kappa; };
  OracleOptions opts;
  opts.micro_dt = 1e-5;
  const auto o = invariantization_oracle(hg, c, kappa_tau_of, opts);
  const auto inv = curvature_torsion(c);
  const GridFunction expected = -2.0 * derivative(inv.kappa) * inv.tau - inv.kappa * derivative(inv.tau);
  CHECK(rel_sup(o.rates[0], expected) < 1e-3);
}

TEST_CASE("oracle of a fixed point is zero") {
  const auto line = testing::projective(32, [](double) { return 0.0; });
  const auto o = invariantization_oracle(flow(FlowKind::SchwarzianKdV), line, schwarzian_of);
  CHECK(o.rates[0].max_abs() < 1e-12);
}

TEST_CASE("lambda realizations differ only by a translation term") {
  const auto u = wave(64);
  const auto k = schwarzian(u);
  OracleOptions opts;
  opts.micro_dt = 1e-6;
  std::vector<GridFunction> stripped;
  for (double lambda : {0.0, 0.5, 1.0}) {
    FlowSpec s = flow(FlowKind::SchwarzianKdVLambda);
    s.lambda = lambda;
    const auto o = invariantization_oracle(s, u, schwarzian_of, opts);
    // u_t = c u' translates, adding c k' to k_t.
    stripped.push_back(o.rates[0] + 3.0 * std::pow(lambda, s.lambda_exponent) * derivative(k));
  }
  CHECK(rel_sup(stripped[1], stripped[0]) < 1e-4);
  CHECK(rel_sup(stripped[2], stripped[0]) < 1e-4);
  CHECK(rel_sup(stripped[0], -0.5 * kdv_rhs(k)) < 1e-4);
}

TEST_CASE("integrating-factor stepping matches plain RK4") {
  const auto u = wave(32);
  FlowSpec exact_linear = flow(FlowKind::SchwarzianKdV);
  FlowSpec plain = exact_linear;
  plain.projective_h = [](const GridFunction& k) { return k; };  // same flow, no integrating factor
  CHECK(std::string(integrator_name(exact_linear)) == "integrating-factor-rk4");
  CHECK(std::string(integrator_name(plain)) == "rk4");
  const auto a = std::get<ProjectiveCurve>(advance(exact_linear, u, 1e-5, 200));
  const auto b = std::get<ProjectiveCurve>(advance(plain, u, 1e-5, 200));
  CHECK(sup_diff(a.periodic, b.periodic) < 1e-10);
  CHECK(sup_diff(a.periodic, u.periodic) > 1e-4);
}

TEST_CASE("integrating-factor stepping converges at fourth order") {
  const auto u = wave(32);
  const FlowSpec spec = flow(FlowKind::SchwarzianKdVLambda);
  const double T = 1.0;
  const auto ref = std::get<ProjectiveCurve>(advance(spec, u, T / 800, 800));
  auto err = [&](int steps) {
    return sup_diff(std::get<ProjectiveCurve>(advance(spec, u, T / steps, steps)).periodic, ref.periodic);
  };
  const double ratio = err(20) / err(40);
  CHECK(ratio > 16.0 * 0.8);
  CHECK(ratio < 16.0 * 1.2);
}

TEST_CASE("stiff grid at the fine time step completes") {
  const auto u = wave(256);
  const auto run = run_flow(flow(FlowKind::SchwarzianKdV), u, 1e-5, 1000, 100);
  CHECK(run.status == FlowRun::Status::Completed);
  CHECK(run.steps_taken == 1000);
  CHECK(run.times.back() == doctest::Approx(1e-2));
}

TEST_CASE("advance runs backwards") {
  const auto u = wave(32);
  for (FlowKind kind : {FlowKind::SchwarzianKdV, FlowKind::SawadaKotera}) {
    const FlowSpec s = flow(kind);
    const double dt = 0.5 * default_dt(s, u);
    const auto there = advance(s, u, dt, 20);
    const auto back = std::get<ProjectiveCurve>(advance(s, there, -dt, 20));
    CHECK(sup_diff(back.periodic, u.periodic) < 1e-9);
  }
}

TEST_CASE("blow-up keeps the last finite snapshot") {
  const auto u = testing::projective(64, [](double x) { return 0.3 * std::sin(x); });
  const auto run = run_flow(flow(FlowKind::SawadaKotera), u, 1e-2, 1000, 1);
  CHECK(run.status != FlowRun::Status::Completed);
  CHECK(run.steps_taken < 1000);
  CHECK_FALSE(run.message.empty());
  for (const auto& [name, hist] : run.histories) CHECK(hist.back().all_finite());
  CHECK(std::get<ProjectiveCurve>(run.snapshots.back()).periodic.all_finite());
}

TEST_CASE("run_flow argument checks") {
  const auto u = wave(32);
  CHECK_THROWS_AS(run_flow(flow(FlowKind::SchwarzianKdV), u, 0.0, 10), Error);
  CHECK_THROWS_AS(run_flow(flow(FlowKind::SchwarzianKdV), u, 1e-4, 10, 0), Error);
  try {
    run_flow(flow(FlowKind::VortexFilament), u, 1e-4, 10);
    FAIL("expected geometry mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GeometryMismatch);
  }
}

TEST_CASE("euclidean-hg run re-parametrizes and reports drift") {
  const auto c = reparametrize_arclength(testing::torus_helix(192));
  FlowSpec hg = flow(FlowKind::EuclideanHG);
  hg.h = [](const EuclideanInvariants& inv) { return 0.1 * inv.kappa; };
  hg.g = [](const EuclideanInvariants& inv) { return inv.kappa; };
  const auto run = run_flow(hg, c, default_dt(hg, c), 40, 20);
  REQUIRE(run.status == FlowRun::Status::Completed);
  CHECK(run.arclength_drift < 1e-5);
  for (const auto& snap : run.snapshots)
    CHECK((std::get<EuclideanCurve>(snap).speed() + (-1.0)).max_abs() < 1e-6);
}

TEST_CASE("dealiased runs use plain RK4") {
  FlowSpec s = flow(FlowKind::SchwarzianKdV);
  s.dealias = true;
  CHECK(std::string(integrator_name(s)) == "rk4");
  const auto u = wave(64);
  const auto run = run_flow(s, u, default_dt(s, u), 50, 25);
  CHECK(run.status == FlowRun::Status::Completed);
}

TEST_CASE("pack and unpack round trip") {
  const Curve c = reparametrize_arclength(testing::torus_helix(64));
  const auto back = unpack(pack(c), c);
  CHECK(pack(back) == pack(c));
  const Curve s = projective_to_star(wave(32));
  CHECK(pack(unpack(pack(s), s)) == pack(s));
}
