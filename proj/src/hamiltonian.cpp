#include "geomflow/hamiltonian.hpp"

#include <cmath>
#include <random>

#include "geomflow/error.hpp"
#include "geomflow/rk4.hpp"
#include "geomflow/solve.hpp"
#include "geomflow/spectral.hpp"

namespace geomflow {

namespace {

const GridFunction& field(const FieldMap& f, const std::string& key, const std::string& op) {
  auto it = f.find(key);
  if (it == f.end()) throw Error(ErrorKind::MissingField, op + " needs field '" + key + "'");
  return it->second;
}

DiffOperator mul(const GridFunction& f, const std::string& label) { return DiffOperator::multiply(f, label); }

// -1/2 D^3 + kD + Dk
DiffOperator reduced_rp1(const GridFunction& k, const std::string& label, double sign = 1.0) {
  const auto& g = k.grid;
  const DiffOperator d = DiffOperator::d(g);
  return sign * (-0.5 * DiffOperator::d(g, 3) + mul(k, label) * d + d * mul(k, label));
}

// D^3 + 2kD + k'
DiffOperator kdv_second(const GridFunction& k, const std::string& label) {
  const auto& g = k.grid;
  return DiffOperator::d(g, 3) + 2.0 * (mul(k, label) * DiffOperator::d(g)) + mul(derivative(k), label + "'");
}

BlockOperator scalar_block(DiffOperator op) {
  BlockOperator b(1, op.grid());
  b.at(0, 0) = std::move(op);
  return b;
}

GridFunction random_band_limited(const PeriodicGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<cplx> c(g.n() / 2 + 1);
  const std::size_t top = std::max<std::size_t>(2, g.n() / 8);
  for (std::size_t k = 0; k <= top && k < c.size(); ++k) {
    const double amp = 1.0 / (1.0 + double(k));
    c[k] = amp * cplx(normal(rng), k == 0 ? 0.0 : normal(rng));
  }
  return from_fourier_coefficients(g, c);
}

}  // namespace

double evaluate(const Functional& h, const GridFunction& k) {
  const auto j = jet(k, h.jet_order);
  std::vector<double> point(j.size());
  GridFunction dens(k.grid);
  for (std::size_t x = 0; x < k.size(); ++x) {
    for (std::size_t i = 0; i < j.size(); ++i) point[i] = j[i][x];
    dens[x] = h.density(point);
  }
  if (!dens.all_finite()) throw Error(ErrorKind::InvalidInput, "non-finite functional density");
  return integrate(dens);
}

GridFunction variational_derivative(const Functional& h, const GridFunction& k) {
  if (h.jet_order < 0 || h.jet_order > 4)
    throw Error(ErrorKind::UnsupportedOrder, "functional density may depend on k..k''''", h.jet_order);
  const auto j = jet(k, h.jet_order);
  std::vector<GridFunction> partial(j.size(), GridFunction(k.grid));
  std::vector<double> point(j.size());
  for (std::size_t x = 0; x < k.size(); ++x) {
    for (std::size_t i = 0; i < j.size(); ++i) point[i] = j[i][x];
    for (std::size_t i = 0; i < j.size(); ++i) {
      // Five-point stencil: the partials get differentiated up to four more
      // times, so roundoff (eps / step) matters more than truncation (step^4).
      const double step = 1e-3 * std::max(1.0, std::abs(point[i]));
      const double saved = point[i];
      auto at = [&](double offset) {
        point[i] = saved + offset * step;
        return h.density(point);
      };
      partial[i][x] = (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * step);
      point[i] = saved;
    }
  }
  GridFunction out(k.grid);
  for (std::size_t i = 0; i < partial.size(); ++i) {
    if (!partial[i].all_finite()) throw Error(ErrorKind::InvalidInput, "non-finite functional density");
    GridFunction term = derivative(partial[i], int(i));
    out += (i % 2 ? -1.0 : 1.0) * term;
  }
  return out;
}

const std::vector<std::string>& poisson_names() {
  static const std::vector<std::string> names = {"kdv-first", "kdv-second", "rp1-reduced", "rp1-companion",
                                                 "euclid-R",  "euclid-A",   "euclid-B",    "euclid-C",
                                                 "conformal-cc", "lagrangian-diag"};
  return names;
}

BlockOperator poisson_catalog(const std::string& name, const PeriodicGrid& g, const FieldMap& fields) {
  for (const auto& [key, f] : fields) require_same_grid(g, f.grid, "poisson_catalog");
  const DiffOperator d = DiffOperator::d(g);

  if (name == "kdv-first") return scalar_block(d);
  if (name == "kdv-second") return scalar_block(kdv_second(field(fields, "k", name), "k"));
  if (name == "rp1-reduced") return scalar_block(reduced_rp1(field(fields, "k", name), "k"));
  if (name == "rp1-companion") return scalar_block(2.0 * d);

  if (name == "euclid-B") {
    BlockOperator b(2, g);
    b.at(0, 1) = DiffOperator::scalar(g, 1.0);
    b.at(1, 0) = DiffOperator::scalar(g, -1.0);
    return b;
  }
  if (name.rfind("euclid-", 0) == 0) {
    const GridFunction& kappa = field(fields, "kappa", name);
    if (!(kappa.min() > 0.0)) throw Error(ErrorKind::DegenerateCurve, name + " needs kappa > 0", kappa.min());
    const GridFunction inv = map(kappa, [](double v) { return 1.0 / v; });
    BlockOperator b(2, g);
    if (name == "euclid-A") {
      b.at(1, 1) = mul(inv, "1/kappa") * d + d * mul(inv, "1/kappa");
      return b;
    }
    if (name == "euclid-C") {
      b.at(0, 1) = mul(inv, "1/kappa") * d;
      b.at(1, 0) = d * mul(inv, "1/kappa");
      return b;
    }
    if (name == "euclid-R") {
      const GridFunction ratio = field(fields, "tau", name) * inv;
      b.at(0, 0) = d;
      b.at(0, 1) = mul(ratio, "tau/kappa") * d;
      b.at(1, 0) = d * mul(ratio, "tau/kappa");
      b.at(1, 1) = -1.0 * d - d * mul(inv, "1/kappa") * d * mul(inv, "1/kappa") * d;
      return b;
    }
  }
  if (name == "conformal-cc") {
    const GridFunction& k1 = field(fields, "k1", name);
    const GridFunction& k2 = field(fields, "k2", name);
    BlockOperator b(2, g);
    b.at(0, 0) = reduced_rp1(k1, "k1");
    b.at(0, 1) = mul(k2, "k2") * d + d * mul(k2, "k2");
    b.at(1, 0) = b.at(0, 1);
    b.at(1, 1) = reduced_rp1(k1, "k1", -1.0);
    return b;
  }
  if (name == "lagrangian-diag") {
    std::size_t m = 0;
    while (fields.count("s" + std::to_string(m))) ++m;
    if (m == 0) throw Error(ErrorKind::MissingField, name + " needs fields s0, s1, ...");
    BlockOperator b(m, g);
    for (std::size_t i = 0; i < m; ++i) {
      const std::string key = "s" + std::to_string(i);
      b.at(i, i) = kdv_second(fields.at(key), key);
    }
    return b;
  }
  throw Error(ErrorKind::Config, "unknown Poisson operator '" + name + "'");
}

double adjoint_residual(const BlockOperator& op, int trials, unsigned seed) {
  std::mt19937_64 rng(seed);
  const auto& g = op.grid();
  const std::size_t m = op.size();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Fields f, h;
    for (std::size_t i = 0; i < m; ++i) f.push_back(random_band_limited(g, rng));
    for (std::size_t i = 0; i < m; ++i) h.push_back(random_band_limited(g, rng));
    const Fields of = op.apply(f), oh = op.apply(h);
    double s = 0.0, nf = 0.0, nh = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      s += inner(of[i], h[i]) + inner(f[i], oh[i]);
      nf += inner(f[i], f[i]);
      nh += inner(h[i], h[i]);
    }
    worst = std::max(worst, std::abs(s) / std::sqrt(nf * nh));
  }
  return worst;
}

double adjoint_residual(const DiffOperator& op, int trials, unsigned seed) {
  return adjoint_residual(scalar_block(op), trials, seed);
}

EuclidP::EuclidP(const GridFunction& kappa, const GridFunction& tau)
    : kappa_(kappa),
      r_(poisson_catalog("euclid-R", kappa.grid, {{"kappa", kappa}, {"tau", tau}})),
      c_(poisson_catalog("euclid-C", kappa.grid, {{"kappa", kappa}})),
      w_g_(kappa.grid),
      w_h_(kappa.grid) {
  auto wg = r_.at(1, 0).strip_leading_derivative();
  auto wh = r_.at(1, 1).strip_leading_derivative();
  if (!wg || !wh) throw Error(ErrorKind::Inconsistency, "second row of R is not D-led");
  w_g_ = *wg;
  w_h_ = *wh;
}

std::array<GridFunction, 2> EuclidP::apply(const GridFunction& g, const GridFunction& h) const {
  const Fields r = r_.apply({g, h});
  // C y = r: D(y1/kappa) = r2 = D W and y2'/kappa = r1.
  const GridFunction y1 = kappa_ * (w_g_.apply(g) + w_h_.apply(h));
  const GridFunction y2 = solve_operator(DiffOperator::d(g.grid), kappa_ * r[0]);
  const Fields out = r_.apply({y1, y2});
  return {-out[0], -out[1]};
}

std::array<GridFunction, 2> euclid_P(const GridFunction& kappa, const GridFunction& tau, const GridFunction& g,
                                     const GridFunction& h) {
  return EuclidP(kappa, tau).apply(g, h);
}

Gradient gradient_of(const Functional& h) {
  return [h](const Fields& k) { return Fields{variational_derivative(h, k.at(0))}; };
}

HamiltonianRun hamiltonian_flow(const OperatorBuilder& op, const Gradient& grad, const Fields& k0, double dt,
                                int steps, int stride) {
  if (k0.empty()) throw Error(ErrorKind::InvalidInput, "hamiltonian_flow needs at least one field");
  const PeriodicGrid& g = k0.front().grid;
  const std::size_t n = g.n();
  auto unpack_fields = [&](const State& s) {
    Fields f;
    for (std::size_t i = 0; i < k0.size(); ++i)
      f.emplace_back(g, std::vector<double>(s.begin() + long(i * n), s.begin() + long((i + 1) * n)));
    return f;
  };
  auto pack_fields = [](const Fields& f) {
    State s;
    for (const auto& x : f) s.insert(s.end(), x.values.begin(), x.values.end());
    return s;
  };
  const RightHandSide rhs = [&](const State& s) {
    const Fields k = unpack_fields(s);
    return pack_fields(op(k).apply(grad(k)));
  };

  HamiltonianRun run;
  run.times.push_back(0.0);
  run.history.push_back(k0);
  State y = pack_fields(k0);
  try {
    for (int i = 1; i <= steps; ++i) {
      y = rk4_step(y, rhs, dt);
      if (i % stride == 0 || i == steps) {
        run.times.push_back(i * dt);
        run.history.push_back(unpack_fields(y));
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BlowUp) throw;
    run.blew_up = true;
    run.message = e.what();
  }
  return run;
}

nlohmann::json operator_json(const BlockOperator& op, const std::string& name) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < op.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < op.size(); ++j) {
      nlohmann::json chains = nlohmann::json::array();
      for (const auto& c : op.at(i, j).chains()) chains.push_back({{"coeff", c.coeff}, {"factors", c.labels()}});
      row.push_back({{"chains", chains}});
    }
    entries.push_back(row);
  }
  nlohmann::json out{{"name", name}, {"size", op.size()}, {"entries", entries}};
  if (name.rfind("euclid-", 0) == 0)
    out["ordering"] = "rows give (kappa_t, tau_t); columns act on (g, h) with u_t = h T + (h'/kappa) N + g B";
  return out;
}

}  // namespace geomflow
