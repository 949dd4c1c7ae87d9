// geomflow simulate | verify | invariants

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "geomflow/error.hpp"
#include "geomflow/flows.hpp"
#include "geomflow/invariants.hpp"
#include "geomflow/io.hpp"
#include "geomflow/kernels.hpp"
#include "geomflow/verify.hpp"

namespace fs = std::filesystem;
using namespace geomflow;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBlowUp = 2;

fs::path default_out() {
  const char* env = std::getenv("GEOMFLOW_OUT");
  return env && *env ? fs::path(env) : fs::path("geomflow_out");
}

struct SimConfig {
  std::string flow;
  std::string geometry;  // optional; checked against the flow
  std::size_t n = 256;
  double period = 2.0 * std::numbers::pi;
  double dt = 0.0;  // 0: default_dt
  int steps = 100;
  int stride = 0;  // 0: steps / 10
  std::string curve;
  std::string initial;
  double amplitude = 0.1;
  std::size_t dim = 2;
  double lambda = 0.0;
  double lambda_exponent = 3.0;
  bool dealias = false;
  std::vector<std::string> checks;
  std::string out;
  unsigned seed = 1;

  json to_json() const {
    return {{"flow", flow},       {"geometry", geometry}, {"n", n},
            {"period", period},   {"dt", dt},             {"steps", steps},
            {"stride", stride},   {"curve", curve},       {"initial", initial},
            {"amplitude", amplitude}, {"dim", dim},       {"lambda", lambda},
            {"lambda_exponent", lambda_exponent},         {"dealias", dealias},
            {"checks", checks},   {"out", out},           {"seed", seed}};
  }
};

template <class T>
T typed(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Config, "config key '" + key + "' has the wrong type");
  }
}

void apply_file(SimConfig& c, const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "flow") c.flow = typed<std::string>(v, key);
    else if (key == "geometry") c.geometry = typed<std::string>(v, key);
    else if (key == "n") c.n = typed<std::size_t>(v, key);
    else if (key == "period") c.period = typed<double>(v, key);
    else if (key == "dt") c.dt = typed<double>(v, key);
    else if (key == "steps") c.steps = typed<int>(v, key);
    else if (key == "stride") c.stride = typed<int>(v, key);
    else if (key == "curve") c.curve = typed<std::string>(v, key);
    else if (key == "initial") c.initial = typed<std::string>(v, key);
    else if (key == "amplitude") c.amplitude = typed<double>(v, key);
    else if (key == "dim") c.dim = typed<std::size_t>(v, key);
    else if (key == "lambda") c.lambda = typed<double>(v, key);
    else if (key == "lambda_exponent") c.lambda_exponent = typed<double>(v, key);
    else if (key == "dealias") c.dealias = typed<bool>(v, key);
    else if (key == "checks") c.checks = typed<std::vector<std::string>>(v, key);
    else if (key == "out") c.out = typed<std::string>(v, key);
    else if (key == "seed") c.seed = typed<unsigned>(v, key);
    else throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
  }
}

void validate(const SimConfig& c) {
  if (c.flow.empty()) throw Error(ErrorKind::Config, "config key 'flow' is required");
  if (c.n < 8) throw Error(ErrorKind::Config, "config key 'n' must be at least 8", double(c.n));
  if (!(c.period > 0.0)) throw Error(ErrorKind::Config, "config key 'period' must be positive", c.period);
  if (!(c.dt >= 0.0)) throw Error(ErrorKind::Config, "config key 'dt' must be non-negative", c.dt);
  if (c.steps < 0) throw Error(ErrorKind::Config, "config key 'steps' must be non-negative", c.steps);
  if (c.stride < 0) throw Error(ErrorKind::Config, "config key 'stride' must be non-negative", c.stride);
  if (c.dim < 1 || c.dim > 8) throw Error(ErrorKind::Config, "config key 'dim' must be in 1..8", double(c.dim));
  const auto& suites = suite_names();
  for (const auto& s : c.checks)
    if (std::find(suites.begin(), suites.end(), s) == suites.end())
      throw Error(ErrorKind::Config, "config key 'checks' names unknown suite '" + s + "'");
}

// Small random Fourier series with decaying amplitudes.
GridFunction random_smooth(const PeriodicGrid& g, std::mt19937_64& rng, double amplitude) {
  std::normal_distribution<double> normal;
  std::array<double, 8> a;
  for (auto& v : a) v = normal(rng);
  const double w = 2.0 * std::numbers::pi / g.length();
  return GridFunction::sample(g, [&](double x) {
    double s = 0.0;
    for (int m = 1; m <= 4; ++m)
      s += amplitude / (m * m) * (a[2 * m - 2] * std::cos(m * w * x) + a[2 * m - 1] * std::sin(m * w * x));
    return s;
  });
}

Curve initial_curve(const SimConfig& c, const std::string& geometry) {
  const PeriodicGrid g(c.n, c.period);
  const double w = 2.0 * std::numbers::pi / c.period;
  std::mt19937_64 rng(c.seed);
  const std::string preset = c.initial.empty() ? (geometry == "euclidean" ? "torus-helix" : "sine") : c.initial;
  auto bad = [&] {
    return Error(ErrorKind::Config, "config key 'initial': no preset '" + preset + "' for " + geometry + " curves");
  };

  auto projective = [&] {
    if (preset == "sine")
      return ProjectiveCurve(1.0, GridFunction::sample(g, [&](double x) { return c.amplitude / w * std::sin(w * x); }));
    if (preset == "random") return ProjectiveCurve(1.0, (1.0 / w) * random_smooth(g, rng, c.amplitude));
    throw bad();
  };
  if (geometry == "projective") return projective();
  if (geometry == "star") return projective_to_star(projective());
  if (geometry == "lagrangian") {
    std::vector<Eigen::MatrixXd> p(c.n, Eigen::MatrixXd::Zero(Eigen::Index(c.dim), Eigen::Index(c.dim)));
    if (preset == "sine") {
      for (std::size_t j = 0; j < c.n; ++j)
        for (std::size_t d = 0; d < c.dim; ++d)
          p[j](Eigen::Index(d), Eigen::Index(d)) = c.amplitude / w * std::sin(w * g.point(j) + double(d));
    } else if (preset == "random") {
      for (std::size_t a = 0; a < c.dim; ++a)
        for (std::size_t b = a; b < c.dim; ++b) {
          const GridFunction f = (a == b ? 1.0 : 0.3) / w * random_smooth(g, rng, c.amplitude);
          for (std::size_t j = 0; j < c.n; ++j) p[j](Eigen::Index(a), Eigen::Index(b)) = p[j](Eigen::Index(b), Eigen::Index(a)) = f[j];
        }
    } else {
      throw bad();
    }
    return LagrangianCurve(Eigen::MatrixXd::Identity(Eigen::Index(c.dim), Eigen::Index(c.dim)), p, g);
  }
  // Euclidean: presets are built on [0, 2 pi) and resampled by arc length.
  const PeriodicGrid unit(c.n, 2.0 * std::numbers::pi);
  const double r0 = c.period / (2.0 * std::numbers::pi);
  if (preset == "circle")
    return EuclideanCurve::sample(g, [&](double x) {
      return Eigen::Vector3d(r0 * std::cos(x / r0), r0 * std::sin(x / r0), 0.0);
    });
  if (preset == "torus-helix")
    return reparametrize_arclength(EuclideanCurve::sample(unit, [&](double t) {
      const double r = 3.0 + 0.6 * std::cos(5.0 * t);
      return Eigen::Vector3d(r * std::cos(t), r * std::sin(t), 0.6 * std::sin(5.0 * t) + c.amplitude * std::cos(2.0 * t));
    }));
  if (preset == "random") {
    const GridFunction a = random_smooth(unit, rng, c.amplitude), b = random_smooth(unit, rng, c.amplitude);
    const GridFunction z = random_smooth(unit, rng, c.amplitude);
    std::array<GridFunction, 3> xyz{GridFunction(unit), GridFunction(unit), GridFunction(unit)};
    for (std::size_t j = 0; j < c.n; ++j) {
      const double t = unit.point(j);
      xyz[0][j] = (1.0 + a[j]) * std::cos(t);
      xyz[1][j] = (1.0 + b[j]) * std::sin(t);
      xyz[2][j] = z[j];
    }
    return reparametrize_arclength(EuclideanCurve(xyz));
  }
  throw bad();
}

std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%05zu.csv", i);
  return buf;
}

int cmd_simulate(SimConfig cfg) {
  validate(cfg);
  FlowSpec spec = FlowSpec::from_name(cfg.flow);
  spec.lambda = cfg.lambda;
  spec.lambda_exponent = cfg.lambda_exponent;
  spec.dealias = cfg.dealias;
  const std::string geometry = flow_geometry(spec.kind);
  if (!cfg.geometry.empty() && cfg.geometry != geometry)
    throw Error(ErrorKind::Config, "config key 'geometry': flow " + cfg.flow + " acts on " + geometry + " curves");
  cfg.geometry = geometry;

  const Curve c0 = cfg.curve.empty() ? initial_curve(cfg, geometry) : io::read_curve(cfg.curve, geometry);
  const auto generic = check_generic(c0);
  if (!generic.pass)
    throw Error(ErrorKind::DegenerateCurve, "initial curve fails the genericity check (" + generic.margin_name + ")",
                generic.margin);
  if (cfg.dt == 0.0) cfg.dt = default_dt(spec, c0);
  if (cfg.stride == 0) cfg.stride = std::max(1, cfg.steps / 10);
  if (cfg.out.empty()) cfg.out = default_out().string();

  const FlowRun run = run_flow(spec, c0, cfg.dt, cfg.steps, cfg.stride);

  const fs::path out(cfg.out);
  fs::create_directories(out / "snapshots");
  json files = json::array();
  for (const auto& [name, history] : run.histories) {
    const std::string f = "history_" + name + ".csv";
    io::write_history(out / f, name, run.times, history);
    files.push_back(f);
  }
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    const fs::path f = fs::path("snapshots") / snapshot_name(i);
    io::write_curve(out / f, run.snapshots[i]);
    files.push_back(f.string());
  }
  io::write_curve(out / "last.csv", run.snapshots.back());
  files.push_back("last.csv");

  const char* status = run.status == FlowRun::Status::Completed ? "completed"
                       : run.status == FlowRun::Status::BlowUp  ? "blow-up"
                                                                : "degenerate";
  json manifest{{"command", "simulate"},
                {"config", cfg.to_json()},
                {"geometry", geometry},
                {"status", status},
                {"message", run.message},
                {"steps_taken", run.steps_taken},
                {"times", run.times},
                {"initial_genericity", {{"margin", generic.margin_name}, {"value", generic.margin}}},
                {"integrator", integrator_name(spec)},
                {"simd_backend", std::string(kernels::active().name)},
                {"files", files}};
  if (spec.kind == FlowKind::EuclideanHG) manifest["arclength_drift"] = run.arclength_drift;

  if (!cfg.checks.empty()) {
    VerifyConfig vc;
    vc.seed = cfg.seed;
    json reports = json::array();
    for (const auto& s : cfg.checks) {
      const auto r = run_suite(s, vc);
      io::write_json(out / ("verify_" + s + ".json"), r.to_json());
      reports.push_back({{"suite", s}, {"pass", r.pass()}});
    }
    manifest["checks"] = reports;
  }
  io::write_json(out / "manifest.json", manifest);

  std::cout << "simulate " << cfg.flow << ": " << status << " after " << run.steps_taken << " steps, wrote "
            << out.string() << "\n";
  if (run.status != FlowRun::Status::Completed) {
    std::cerr << run.message << "\n";
    return kExitBlowUp;
  }
  return kExitOk;
}

int cmd_verify(const std::vector<std::string>& suites, bool all, const std::vector<std::string>& overrides,
               unsigned seed, const std::string& out) {
  std::vector<std::string> names = all ? suite_names() : suites;
  if (names.empty()) throw Error(ErrorKind::Config, "verify needs a suite name or --all");
  const auto& known = suite_names();
  for (const auto& s : names)
    if (std::find(known.begin(), known.end(), s) == known.end())
      throw Error(ErrorKind::Config, "unknown verification suite '" + s + "'");

  VerifyConfig vc;
  vc.seed = seed;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, "--tolerance expects key=value, got '" + o + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(o.substr(eq + 1), &used);
      if (used != o.size() - eq - 1) throw std::invalid_argument(o);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "--tolerance value is not a number in '" + o + "'");
    }
    vc.tolerances.set(o.substr(0, eq), v);
  }

  json reports = json::array();
  bool ok = true;
  for (const auto& s : names) {
    const auto r = run_suite(s, vc);
    ok = ok && r.pass();
    reports.push_back(r.to_json());
    std::cerr << (r.pass() ? "PASS " : "FAIL ") << s << "\n";
  }
  const json report{{"pass", ok}, {"seed", seed}, {"suites", reports}};
  if (out.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    io::write_json(out, report);
  }
  return ok ? kExitOk : kExitError;
}

int cmd_invariants(const std::string& curve, const std::string& geometry, std::string out) {
  static const std::set<std::string> geometries{"euclidean", "projective", "star", "lagrangian"};
  if (!geometries.count(geometry)) throw Error(ErrorKind::Config, "unknown geometry '" + geometry + "'");
  const Curve c = io::read_curve(curve, geometry);
  if (out.empty()) out = default_out().string();
  fs::create_directories(out);
  const fs::path dir(out);

  std::map<std::string, GridFunction> fields;
  json files = json::array({"invariants.csv"});
  if (geometry == "euclidean") {
    const auto inv = curvature_torsion(std::get<EuclideanCurve>(c));
    const auto nat = hasimoto(inv);
    fields.emplace("kappa", inv.kappa);
    fields.emplace("tau", inv.tau);
    fields.emplace("nu", nat.nu);
    fields.emplace("eta", nat.eta);
    io::write_grid_function(dir / "phi.csv", nat.phi);
    files.push_back("phi.csv");
  } else if (geometry == "projective") {
    fields.emplace("S", schwarzian(std::get<ProjectiveCurve>(c)));
  } else if (geometry == "star") {
    const auto& s = std::get<StarCurve>(c);
    fields.emplace("det", s.wronskian());
    fields.emplace("p", centroaffine_curvature(s, 1e-6).p);
  } else {
    const auto ls = lagrangian_schwarzian(std::get<LagrangianCurve>(c));
    for (std::size_t i = 0; i < ls.s_d.size(); ++i) fields.emplace("s" + std::to_string(i), ls.s_d[i]);
  }
  io::write_fields(dir / "invariants.csv", fields);
  const auto generic = check_generic(c);
  std::cout << json{{"geometry", geometry},
                    {"files", files},
                    {"genericity", {{"margin", generic.margin_name}, {"value", generic.margin}, {"pass", generic.pass}}}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant curve flows: simulate, verify, invariants"};
  app.require_subcommand(1);

  SimConfig flags;
  std::string config_file;
  auto* sim = app.add_subcommand("simulate", "Integrate a curve flow and record invariant histories");
  sim->add_option("--config", config_file, "JSON config file; flags override its entries");
  auto* o_flow = sim->add_option("--flow", flags.flow, "Flow name");
  auto* o_geom = sim->add_option("--geometry", flags.geometry, "Geometry (checked against the flow)");
  auto* o_n = sim->add_option("--n", flags.n, "Grid size");
  auto* o_period = sim->add_option("--period", flags.period, "Period of the parameter");
  auto* o_dt = sim->add_option("--dt", flags.dt, "Time step (0: stability heuristic)");
  auto* o_steps = sim->add_option("--steps", flags.steps, "Number of RK4 steps");
  auto* o_stride = sim->add_option("--stride", flags.stride, "Steps between recorded snapshots");
  auto* o_curve = sim->add_option("--curve", flags.curve, "Initial curve CSV");
  auto* o_initial = sim->add_option("--initial", flags.initial, "Preset initial curve (sine, random, circle, torus-helix)");
  auto* o_amp = sim->add_option("--amplitude", flags.amplitude, "Perturbation amplitude of the preset");
  auto* o_dim = sim->add_option("--dim", flags.dim, "Matrix size for Lagrangian curves");
  auto* o_lambda = sim->add_option("--lambda", flags.lambda, "Spectral parameter");
  auto* o_lexp = sim->add_option("--lambda-exponent", flags.lambda_exponent, "Power of lambda in the translation term");
  auto* o_dealias = sim->add_flag("--dealias", flags.dealias, "Apply 2/3-rule truncation to the velocity");
  auto* o_checks = sim->add_option("--checks", flags.checks, "Verification suites to run after the simulation");
  auto* o_out = sim->add_option("--out", flags.out, "Output directory (default $GEOMFLOW_OUT)");
  auto* o_seed = sim->add_option("--seed", flags.seed, "RNG seed for random presets");

  std::vector<std::string> suites, overrides;
  bool all = false;
  unsigned verify_seed = VerifyConfig{}.seed;
  std::string verify_out;
  auto* ver = app.add_subcommand("verify", "Run verification suites and print a JSON report");
  ver->add_option("suites", suites, "Suite names");
  ver->add_flag("--all", all, "Run every suite");
  ver->add_option("--tolerance", overrides, "Override a tolerance, key=value");
  ver->add_option("--seed", verify_seed, "RNG seed");
  ver->add_option("--out", verify_out, "Write the report here instead of stdout");

  std::string inv_curve, inv_geometry, inv_out;
  auto* inv = app.add_subcommand("invariants", "Compute the differential invariants of a curve file");
  inv->add_option("--curve", inv_curve, "Curve CSV")->required();
  inv->add_option("--geometry", inv_geometry, "euclidean, projective, star or lagrangian")->required();
  inv->add_option("--out", inv_out, "Output directory (default $GEOMFLOW_OUT)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (sim->parsed()) {
      SimConfig cfg;
      if (!config_file.empty()) apply_file(cfg, io::read_json(config_file));
      if (o_flow->count()) cfg.flow = flags.flow;
      if (o_geom->count()) cfg.geometry = flags.geometry;
      if (o_n->count()) cfg.n = flags.n;
      if (o_period->count()) cfg.period = flags.period;
      if (o_dt->count()) cfg.dt = flags.dt;
      if (o_steps->count()) cfg.steps = flags.steps;
      if (o_stride->count()) cfg.stride = flags.stride;
      if (o_curve->count()) cfg.curve = flags.curve;
      if (o_initial->count()) cfg.initial = flags.initial;
      if (o_amp->count()) cfg.amplitude = flags.amplitude;
      if (o_dim->count()) cfg.dim = flags.dim;
      if (o_lambda->count()) cfg.lambda = flags.lambda;
      if (o_lexp->count()) cfg.lambda_exponent = flags.lambda_exponent;
      if (o_dealias->count()) cfg.dealias = flags.dealias;
      if (o_checks->count()) cfg.checks = flags.checks;
      if (o_out->count()) cfg.out = flags.out;
      if (o_seed->count()) cfg.seed = flags.seed;
      return cmd_simulate(cfg);
    }
    if (ver->parsed()) return cmd_verify(suites, all, overrides, verify_seed, verify_out);
    return cmd_invariants(inv_curve, inv_geometry, inv_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
