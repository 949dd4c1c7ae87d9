#include "geomflow/flows.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "geomflow/error.hpp"
#include "geomflow/frames.hpp"
#include "geomflow/spectral.hpp"

namespace geomflow {

namespace {

struct NamedFlow {
  const char* name;
  FlowKind kind;
  const char* geometry;
  int order;  // highest spatial derivative in the velocity
};

constexpr NamedFlow kFlows[] = {
    {"vortex-filament", FlowKind::VortexFilament, "euclidean", 2},
    {"euclidean-hg", FlowKind::EuclideanHG, "euclidean", 3},
    {"schwarzian-kdv", FlowKind::SchwarzianKdV, "projective", 3},
    {"schwarzian-kdv-lambda", FlowKind::SchwarzianKdVLambda, "projective", 3},
    {"sawada-kotera-realization", FlowKind::SawadaKotera, "projective", 5},
    {"lagrangian-skdv", FlowKind::LagrangianSKdV, "lagrangian", 3},
    {"pinkall-star", FlowKind::PinkallStar, "star", 3},
};

const NamedFlow& lookup(FlowKind kind) {
  for (const auto& f : kFlows)
    if (f.kind == kind) return f;
  throw Error(ErrorKind::Config, "unknown flow kind");
}

template <class T>
const T& expect(const Curve& c, FlowKind kind) {
  if (const T* p = std::get_if<T>(&c)) return *p;
  throw Error(ErrorKind::GeometryMismatch,
              std::string("flow ") + lookup(kind).name + " needs a " + lookup(kind).geometry + " curve, got " +
                  geometry_name(c));
}

GridFunction maybe_dealias(const FlowSpec& spec, GridFunction f) { return spec.dealias ? dealias(f) : f; }

TangentField euclidean_velocity(const FlowSpec& spec, const EuclideanCurve& c) {
  const EuclideanInvariants inv = curvature_torsion(c);
  const FrenetFrame f = frenet_frame(c);
  if (spec.kind == FlowKind::VortexFilament)
    return {inv.kappa * f.B[0], inv.kappa * f.B[1], inv.kappa * f.B[2]};
  const GridFunction h = spec.h ? spec.h(inv) : GridFunction(c.grid);
  const GridFunction g = spec.g ? spec.g(inv) : inv.kappa;
  // N-coefficient h'/kappa with h' taken in arc length.
  const GridFunction hn = derivative(h) / c.speed() / inv.kappa;
  TangentField v;
  for (int i = 0; i < 3; ++i) v.push_back(h * f.T[i] + hn * f.N[i] + g * f.B[i]);
  return v;
}

GridFunction projective_velocity(const FlowSpec& spec, const ProjectiveCurve& u) {
  const GridFunction s = schwarzian(u);
  GridFunction h(u.grid);
  switch (spec.kind) {
    case FlowKind::SchwarzianKdV:
      h = spec.projective_h ? spec.projective_h(s) : s;
      break;
    case FlowKind::SchwarzianKdVLambda:
      h = -0.5 * s + (-3.0 * std::pow(spec.lambda, spec.lambda_exponent));
      break;
    case FlowKind::SawadaKotera:
      h = 2.0 * derivative(s, 2) + 0.5 * (s * s);
      break;
    default:
      throw Error(ErrorKind::GeometryMismatch, "not a projective flow");
  }
  return maybe_dealias(spec, u.derivative(1) * h);
}

std::array<GridFunction, 2> star_velocity(const FlowSpec& spec, const StarCurve& c) {
  const auto d1 = c.derivative(1);
  const auto d2 = c.derivative(2);
  const GridFunction p = d2[0] * d1[1] - d2[1] * d1[0];  // gamma'' = p gamma
  const GridFunction h = -2.0 * p;
  const GridFunction dh = derivative(h);
  // gamma = E gamma~ with E' = G E: gamma~_t = h (gamma~' + G gamma~) - h'/2 gamma~.
  const auto& q = c.periodic;
  const GridFunction q0 = derivative(q[0]), q1 = derivative(q[1]);
  const Eigen::Matrix2d& G = c.generator;
  GridFunction a0 = q0 + G(0, 0) * q[0] + G(0, 1) * q[1];
  GridFunction a1 = q1 + G(1, 0) * q[0] + G(1, 1) * q[1];
  return {maybe_dealias(spec, h * a0 - 0.5 * (dh * q[0])), maybe_dealias(spec, h * a1 - 0.5 * (dh * q[1]))};
}

std::vector<Eigen::MatrixXd> lagrangian_velocity(const LagrangianCurve& c) {
  const auto u1 = c.derivative(1);
  const auto u2 = c.derivative(2);
  const auto u3 = c.derivative(3);
  std::vector<Eigen::MatrixXd> v(c.grid.n());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = u3[k] - 1.5 * u2[k] * u1[k].llt().solve(u2[k]);
    v[k] = 0.5 * (v[k] + v[k].transpose());
  }
  return v;
}

TangentField upper_triangle(const std::vector<Eigen::MatrixXd>& m, const PeriodicGrid& g) {
  TangentField out;
  const Eigen::Index d = m.front().rows();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) {
      GridFunction f(g);
      for (std::size_t k = 0; k < m.size(); ++k) f[k] = m[k](i, j);
      out.push_back(std::move(f));
    }
  return out;
}

void append(State& s, const GridFunction& f) { s.insert(s.end(), f.values.begin(), f.values.end()); }

GridFunction slice(const State& s, std::size_t which, const PeriodicGrid& g) {
  const std::size_t n = g.n();
  return GridFunction(g, std::vector<double>(s.begin() + long(which * n), s.begin() + long((which + 1) * n)));
}

State pack_field(const TangentField& v) {
  State s;
  for (const auto& f : v) append(s, f);
  return s;
}

double stiffness_scale(const Curve& c) {
  const auto inv = record_invariants(c);
  double m = 1.0;
  for (const auto& [name, f] : inv)
    if (name != "det") m = std::max(m, f.max_abs());
  return m;
}

}  // namespace

std::string FlowSpec::name() const { return lookup(kind).name; }

FlowSpec FlowSpec::from_name(const std::string& name) {
  for (const auto& f : kFlows)
    if (name == f.name) {
      FlowSpec s;
      s.kind = f.kind;
      return s;
    }
  throw Error(ErrorKind::Config, "unknown flow '" + name + "'");
}

const std::vector<std::string>& flow_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& f : kFlows) v.emplace_back(f.name);
    return v;
  }();
  return names;
}

const char* flow_geometry(FlowKind kind) { return lookup(kind).geometry; }

TangentField flow_vector_field(const FlowSpec& spec, const Curve& c) {
  switch (spec.kind) {
    case FlowKind::VortexFilament:
    case FlowKind::EuclideanHG:
      return euclidean_velocity(spec, expect<EuclideanCurve>(c, spec.kind));
    case FlowKind::SchwarzianKdV:
    case FlowKind::SchwarzianKdVLambda:
    case FlowKind::SawadaKotera:
      return {projective_velocity(spec, expect<ProjectiveCurve>(c, spec.kind))};
    case FlowKind::LagrangianSKdV: {
      const auto& l = expect<LagrangianCurve>(c, spec.kind);
      return upper_triangle(lagrangian_velocity(l), l.grid);
    }
    case FlowKind::PinkallStar: {
      const auto& s = expect<StarCurve>(c, spec.kind);
      auto v = star_velocity(spec, s);
      for (std::size_t j = 0; j < s.grid.n(); ++j) {
        const Eigen::Vector2d w = s.twist(s.grid.point(j)) * Eigen::Vector2d(v[0][j], v[1][j]);
        v[0][j] = w(0);
        v[1][j] = w(1);
      }
      return {v[0], v[1]};
    }
  }
  throw Error(ErrorKind::Config, "unknown flow kind");
}

State state_velocity(const FlowSpec& spec, const Curve& c) {
  if (spec.kind == FlowKind::PinkallStar) {
    const auto v = star_velocity(spec, expect<StarCurve>(c, spec.kind));
    return pack_field({v[0], v[1]});
  }
  State s = pack_field(flow_vector_field(spec, c));
  for (double v : s)
    if (!std::isfinite(v)) throw Error(ErrorKind::BlowUp, "non-finite flow velocity");
  return s;
}

State pack(const Curve& c) {
  State s;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EuclideanCurve>) {
          for (const auto& f : v.coords) append(s, f);
        } else if constexpr (std::is_same_v<T, ProjectiveCurve>) {
          append(s, v.periodic);
        } else if constexpr (std::is_same_v<T, StarCurve>) {
          for (const auto& f : v.periodic) append(s, f);
        } else {
          for (std::size_t i = 0; i < v.dim(); ++i)
            for (std::size_t j = i; j < v.dim(); ++j) append(s, v.entry(i, j));
        }
      },
      c);
  return s;
}

Curve unpack(const State& s, const Curve& like) {
  const PeriodicGrid& g = grid_of(like);
  return std::visit(
      [&](const auto& v) -> Curve {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EuclideanCurve>) {
          return EuclideanCurve({slice(s, 0, g), slice(s, 1, g), slice(s, 2, g)});
        } else if constexpr (std::is_same_v<T, ProjectiveCurve>) {
          return ProjectiveCurve(v.slope, slice(s, 0, g));
        } else if constexpr (std::is_same_v<T, StarCurve>) {
          return StarCurve({slice(s, 0, g), slice(s, 1, g)}, v.generator);
        } else {
          const Eigen::Index d = Eigen::Index(v.dim());
          std::vector<Eigen::MatrixXd> p(g.n(), Eigen::MatrixXd::Zero(d, d));
          std::size_t which = 0;
          for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = i; j < d; ++j, ++which)
              for (std::size_t k = 0; k < g.n(); ++k) p[k](i, j) = p[k](j, i) = s[which * g.n() + k];
          return LagrangianCurve(v.slope, std::move(p), g);
        }
      },
      like);
}

std::map<std::string, GridFunction> record_invariants(const Curve& c) {
  std::map<std::string, GridFunction> out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EuclideanCurve>) {
          auto inv = curvature_torsion(v);
          out.emplace("kappa", std::move(inv.kappa));
          out.emplace("tau", std::move(inv.tau));
        } else if constexpr (std::is_same_v<T, ProjectiveCurve>) {
          out.emplace("S", schwarzian(v));
        } else if constexpr (std::is_same_v<T, StarCurve>) {
          const auto d1 = v.derivative(1);
          const auto d2 = v.derivative(2);
          out.emplace("p", d2[0] * d1[1] - d2[1] * d1[0]);
          out.emplace("det", v.wronskian());
        } else {
          auto ls = lagrangian_schwarzian(v);
          for (std::size_t i = 0; i < ls.s_d.size(); ++i) out.emplace("s" + std::to_string(i), std::move(ls.s_d[i]));
        }
      },
      c);
  return out;
}

namespace {

// u' S(u) = u''' - 3/2 u''^2 / u', so the built-in Schwarzian KdV flows carry a
// constant a D^3 term; it is propagated exactly and only the rest goes through RK4.
std::optional<double> stiff_coefficient(const FlowSpec& spec) {
  if (spec.dealias) return std::nullopt;
  if (spec.kind == FlowKind::SchwarzianKdV && !spec.projective_h) return 1.0;
  if (spec.kind == FlowKind::SchwarzianKdVLambda) return -0.5;
  return std::nullopt;
}

// exp(tau a D^3) on periodic samples; Nyquist is left alone, as derivative() drops it.
State propagate(const State& y, const PeriodicGrid& g, double a, double tau) {
  auto c = fourier_coefficients(GridFunction(g, y));
  const std::size_t n = g.n();
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (n % 2 == 0 && k == n / 2) continue;
    const double kk = g.wavenumber(double(k));
    c[k] *= std::polar(1.0, -a * kk * kk * kk * tau);
  }
  return from_fourier_coefficients(g, c).values;
}

State axpy(State x, double c, const State& z) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += c * z[i];
  return x;
}

// Lawson RK4, signed step h.
State integrating_factor_step(const FlowSpec& spec, double a, const State& y, const Curve& like, double h) {
  const PeriodicGrid& g = grid_of(like);
  auto rest = [&](const State& s) {
    State v = state_velocity(spec, unpack(s, like));
    const GridFunction d3 = derivative(GridFunction(g, s), 3);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= a * d3[i];
    return v;
  };
  auto half = [&](const State& s) { return propagate(s, g, a, 0.5 * h); };
  const State k1 = rest(y);
  const State k2 = rest(half(axpy(y, 0.5 * h, k1)));
  const State y_half = half(y);
  const State k3 = rest(axpy(y_half, 0.5 * h, k2));
  const State y_full = half(y_half);
  const State k4 = rest(axpy(y_full, h, half(k3)));
  State out = axpy(y_full, h / 6.0, half(half(k1)));
  out = axpy(out, h / 3.0, half(axpy(k2, 1.0, k3)));
  out = axpy(out, h / 6.0, k4);
  for (double v : out)
    if (!std::isfinite(v)) throw Error(ErrorKind::BlowUp, "non-finite state after integrating-factor step", h);
  return out;
}

// One step of signed size h; `like` supplies the curve type and linear part.
State step_state(const FlowSpec& spec, const State& y, const Curve& like, double h) {
  if (const auto a = stiff_coefficient(spec)) return integrating_factor_step(spec, *a, y, like, h);
  const bool backward = h < 0.0;
  const RightHandSide rhs = [&](const State& s) {
    State v = state_velocity(spec, unpack(s, like));
    if (backward)
      for (double& x : v) x = -x;
    return v;
  };
  return rk4_step(y, rhs, std::abs(h));
}

}  // namespace

const char* integrator_name(const FlowSpec& spec) {
  return stiff_coefficient(spec) ? "integrating-factor-rk4" : "rk4";
}

double default_dt(const FlowSpec& spec, const Curve& c) {
  const double dx = grid_of(c).dx();
  // With D^3 handled exactly the explicit remainder is second order.
  const int order = stiff_coefficient(spec) ? 2 : lookup(spec.kind).order;
  return 2.0 * std::pow(dx / std::numbers::pi, order) / stiffness_scale(c);
}

Curve advance(const FlowSpec& spec, const Curve& c, double dt, int steps) {
  if (steps == 0 || dt == 0.0) return c;
  State y = pack(c);
  for (int i = 0; i < steps; ++i) y = step_state(spec, y, c, dt);
  return unpack(y, c);
}

FlowRun run_flow(const FlowSpec& spec, const Curve& c0, double dt, int steps, int stride) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidInput, "run_flow needs dt > 0", dt);
  if (steps < 0 || stride < 1) throw Error(ErrorKind::InvalidInput, "run_flow needs steps >= 0 and stride >= 1");
  if (std::string(flow_geometry(spec.kind)) != geometry_name(c0))
    throw Error(ErrorKind::GeometryMismatch,
                "flow " + spec.name() + " needs a " + flow_geometry(spec.kind) + " curve, got " + geometry_name(c0));

  FlowRun run(c0);
  run.dt = dt;
  run.steps = steps;
  run.stride = stride;
  auto record = [&](const Curve& c, double t) {
    run.times.push_back(t);
    run.snapshots.push_back(c);
    for (auto& [name, f] : record_invariants(c)) run.histories[name].push_back(std::move(f));
  };

  Curve current = c0;
  record(current, 0.0);
  const bool reparam = spec.kind == FlowKind::EuclideanHG;
  State y = pack(current);  // last state that came out of a successful step
  try {
    for (int i = 1; i <= steps; ++i) {
      y = step_state(spec, y, current, dt);
      run.steps_taken = i;
      if (i % stride == 0 || i == steps) {
        current = unpack(y, current);
        if (reparam) {
          const auto& e = std::get<EuclideanCurve>(current);
          run.arclength_drift = std::max(run.arclength_drift, (e.speed() + (-1.0)).max_abs());
          current = reparametrize_arclength(e);
          y = pack(current);
        }
        record(current, i * dt);
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::BlowUp)
      run.status = FlowRun::Status::BlowUp;
    else if (e.kind() == ErrorKind::DegenerateCurve || e.kind() == ErrorKind::FrameDegenerate)
      run.status = FlowRun::Status::Degenerate;
    else
      throw;
    run.message = e.what();
    const double t = run.steps_taken * dt;
    if (run.times.back() != t) {
      try {
        record(unpack(y, current), t);
      } catch (const Error&) {
        // the last finite state is itself degenerate; keep the previous snapshot
      }
    }
  }
  return run;
}

OracleResult invariantization_oracle(const FlowSpec& spec, const Curve& c, const InvariantFn& invariants,
                                     const OracleOptions& opts) {
  const double h = opts.micro_dt;
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidInput, "oracle micro_dt must be positive", h);
  // States at t = +-h, +-2h, +-4h.
  const Curve p1 = advance(spec, c, h, 1), p2 = advance(spec, p1, h, 1), p4 = advance(spec, p2, h, 2);
  const Curve m1 = advance(spec, c, -h, 1), m2 = advance(spec, m1, -h, 1), m4 = advance(spec, m2, -h, 2);
  const auto f_p1 = invariants(p1), f_p2 = invariants(p2), f_p4 = invariants(p4);
  const auto f_m1 = invariants(m1), f_m2 = invariants(m2), f_m4 = invariants(m4);

  OracleResult out;
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < f_p1.size(); ++i) {
    GridFunction fine =
        band_limit((f_m2[i] - 8.0 * f_m1[i] + 8.0 * f_p1[i] - f_p2[i]) * (1.0 / (12.0 * h)), opts.band_limit);
    GridFunction coarse =
        band_limit((f_m4[i] - 8.0 * f_m2[i] + 8.0 * f_p2[i] - f_p4[i]) * (1.0 / (24.0 * h)), opts.band_limit);
    scale = std::max(scale, fine.max_abs());
    diff = std::max(diff, (fine - coarse).max_abs());
    out.rates.push_back(std::move(fine));
  }
  out.error_estimate = scale > 0.0 ? diff / 15.0 / scale : diff / 15.0;
  if (out.error_estimate > opts.richardson_tol)
    throw Error(ErrorKind::OracleUnreliable, "time-stencil error estimate exceeds tolerance", out.error_estimate);
  return out;
}

}  // namespace geomflow
