#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "geomflow/curves.hpp"
#include "geomflow/invariants.hpp"
#include "geomflow/rk4.hpp"

namespace geomflow {

enum class FlowKind {
  VortexFilament,       // u_t = kappa B
  EuclideanHG,          // u_t = h T + (h'/kappa) N + g B
  SchwarzianKdV,        // u_t = u' S(u), or u' h(S) with a custom h
  SchwarzianKdVLambda,  // u_t = u' (-S/2 - 3 lambda^p)
  SawadaKotera,         // u_t = u' (2 S'' + S^2 / 2)
  LagrangianSKdV,       // u_t = u3 - 3/2 u2 u1^{-1} u2
  PinkallStar,          // gamma_t = h gamma' - h'/2 gamma, h = -2p
};

using EuclideanCoefficient = std::function<GridFunction(const EuclideanInvariants&)>;
using ScalarCoefficient = std::function<GridFunction(const GridFunction& k)>;

struct FlowSpec {
  FlowKind kind = FlowKind::SchwarzianKdV;
  EuclideanCoefficient h;  // euclidean-hg
  EuclideanCoefficient g;  // euclidean-hg
  ScalarCoefficient projective_h;  // optional h(k) for schwarzian-kdv
  double lambda = 0.0;
  double lambda_exponent = 3.0;
  bool dealias = false;

  std::string name() const;
  /// Accepts the catalog names; throws Config for anything else.
  static FlowSpec from_name(const std::string& name);
};

const std::vector<std::string>& flow_names();
/// Geometry a flow acts on ("euclidean", "projective", "star", "lagrangian").
const char* flow_geometry(FlowKind kind);

using TangentField = std::vector<GridFunction>;

/// du/dt at every node: 3 components (Euclidean), 1 (projective u_t),
/// 2 (star gamma_t), or the upper triangle of u_t row by row (Lagrangian).
TangentField flow_vector_field(const FlowSpec& spec, const Curve& c);

/// Flat state of the periodic degrees of freedom and its inverse.
State pack(const Curve& c);
Curve unpack(const State& s, const Curve& like);
/// d/dt of pack(c) under the flow.
State state_velocity(const FlowSpec& spec, const Curve& c);

/// Invariant fields recorded along runs: kappa/tau, S, p/det, or s_d eigenvalues.
std::map<std::string, GridFunction> record_invariants(const Curve& c);

/// Stability heuristic for explicit RK4: 2 (dx/pi)^m / max(1, |k|_inf), m the
/// order of the highest spatial derivative left to the explicit stages.
double default_dt(const FlowSpec& spec, const Curve& c);

/// "integrating-factor-rk4" for the built-in Schwarzian KdV flows without
/// dealiasing, whose constant-coefficient D^3 term is propagated exactly in
/// Fourier space; "rk4" otherwise.
const char* integrator_name(const FlowSpec& spec);

struct FlowRun {
  enum class Status { Completed, BlowUp, Degenerate };
  explicit FlowRun(Curve c) : initial(std::move(c)) {}

  Curve initial;
  double dt = 0.0;
  int steps = 0;
  int stride = 1;
  int steps_taken = 0;
  Status status = Status::Completed;
  std::string message;
  std::vector<double> times;
  std::vector<Curve> snapshots;  // every stride; the last entry is the last finite state
  std::map<std::string, std::vector<GridFunction>> histories;
  double arclength_drift = 0.0;  // euclidean-hg: max |speed - 1| seen before each re-parametrization
};

FlowRun run_flow(const FlowSpec& spec, const Curve& c0, double dt, int steps, int stride = 1);

/// Integrates a flow by a signed time (negative runs backwards).
Curve advance(const FlowSpec& spec, const Curve& c, double dt, int steps);

using InvariantFn = std::function<std::vector<GridFunction>(const Curve&)>;

struct OracleOptions {
  double micro_dt = 1e-7;
  double richardson_tol = 1e-3;  // relative bound on the estimated stencil error
  // Fraction of the spectrum kept in the output. Roundoff in the states is
  // amplified by k^m / micro_dt for an m-th order invariant, so fine grids need
  // the unresolved tail projected out before the stencil is trusted.
  double band_limit = 1.0;
};

struct OracleResult {
  std::vector<GridFunction> rates;
  double error_estimate = 0.0;  // |D_h - D_2h| / 15, relative to |D_h|
};

/// d/dt of the invariants at t = 0 by a 5-point central difference over RK4
/// micro-steps forwards and backwards. Throws OracleUnreliable when the
/// Richardson estimate exceeds the tolerance.
OracleResult invariantization_oracle(const FlowSpec& spec, const Curve& c, const InvariantFn& invariants,
                                     const OracleOptions& opts = {});

}  // namespace geomflow
