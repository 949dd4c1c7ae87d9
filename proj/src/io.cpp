#include "geomflow/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "geomflow/error.hpp"
#include "geomflow/spectral.hpp"

namespace geomflow::io {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

fs::path sidecar(const fs::path& p) { return fs::path(p.string() + ".json"); }

PeriodicGrid grid_from_nodes(const std::vector<double>& x, const fs::path& path) {
  const std::size_t n = x.size();
  if (n < 8) throw Error(ErrorKind::InvalidInput, path.string() + ": need at least 8 rows", double(n));
  const double dx = x[1] - x[0];
  if (std::abs(x[0]) > 1e-12 * std::max(1.0, std::abs(dx)) || !(dx > 0.0))
    throw Error(ErrorKind::InvalidInput, path.string() + ": x must start at 0 and increase");
  for (std::size_t j = 1; j < n; ++j)
    if (std::abs(x[j] - x[0] - double(j) * dx) > 1e-9 * std::max(1.0, std::abs(x[j])))
      throw Error(ErrorKind::InvalidInput, path.string() + ": nodes are not uniform (line " + std::to_string(j + 2) + ")");
  return PeriodicGrid(n, dx * double(n));
}

std::vector<double> column(const Table& t, std::size_t c) {
  std::vector<double> v;
  for (const auto& r : t.rows) v.push_back(r[c]);
  return v;
}

// Least-squares split v = m x + trigonometric polynomial of degree n/4.
std::pair<double, std::vector<double>> split_linear(const PeriodicGrid& g, const std::vector<double>& v) {
  const std::size_t n = g.n();
  const std::size_t deg = n / 4;
  Eigen::MatrixXd a(n, 2 + 2 * deg);
  Eigen::VectorXd b(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.point(j);
    a(j, 0) = x;
    a(j, 1) = 1.0;
    for (std::size_t k = 1; k <= deg; ++k) {
      a(j, 2 * k) = std::cos(g.wavenumber(double(k)) * x);
      a(j, 2 * k + 1) = std::sin(g.wavenumber(double(k)) * x);
    }
    b(j) = v[j];
  }
  const double m = a.colPivHouseholderQr().solve(b)(0);
  std::vector<double> p(n);
  for (std::size_t j = 0; j < n; ++j) p[j] = v[j] - m * g.point(j);
  return {m, p};
}

void expect_header(const Table& t, const std::vector<std::string>& want, const fs::path& path) {
  if (t.header != want) {
    std::string w;
    for (const auto& h : want) w += (w.empty() ? "" : ",") + h;
    throw Error(ErrorKind::InvalidInput, path.string() + ": expected header '" + w + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + path.string());
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size())
      throw Error(ErrorKind::InvalidInput,
                  path.string() + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                      " fields, expected " + std::to_string(t.header.size()),
                  double(lineno));
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size() || !std::isfinite(v))
        throw Error(ErrorKind::InvalidInput,
                    path.string() + ": line " + std::to_string(lineno) + ": bad number '" + c + "'", double(lineno));
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw Error(ErrorKind::InvalidInput, path.string() + ": empty file");
  return t;
}

void write_csv(const fs::path& path, const Table& t) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
    out << '\n';
  }
}

void write_grid_function(const fs::path& path, const GridFunction& f, const std::string& name) {
  Table t{{"x", name}, {}};
  for (std::size_t j = 0; j < f.size(); ++j) t.rows.push_back({f.grid.point(j), f[j]});
  write_csv(path, t);
}

void write_grid_function(const fs::path& path, const ComplexGridFunction& f) {
  Table t{{"x", "re", "im"}, {}};
  for (std::size_t j = 0; j < f.size(); ++j) t.rows.push_back({f.grid.point(j), f.values[j].real(), f.values[j].imag()});
  write_csv(path, t);
}

GridFunction read_grid_function(const fs::path& path) {
  const Table t = read_csv(path);
  if (t.header.size() != 2 || t.header[0] != "x")
    throw Error(ErrorKind::InvalidInput, path.string() + ": expected header 'x,<name>'");
  return GridFunction(grid_from_nodes(column(t, 0), path), column(t, 1));
}

void write_fields(const fs::path& path, const std::map<std::string, GridFunction>& fields) {
  if (fields.empty()) throw Error(ErrorKind::InvalidInput, "no fields to write");
  const auto& g = fields.begin()->second.grid;
  Table t{{"x"}, {}};
  for (const auto& [name, f] : fields) {
    require_same_grid(g, f.grid, "write_fields");
    t.header.push_back(name);
  }
  for (std::size_t j = 0; j < g.n(); ++j) {
    std::vector<double> r{g.point(j)};
    for (const auto& [name, f] : fields) r.push_back(f[j]);
    t.rows.push_back(std::move(r));
  }
  write_csv(path, t);
}

void write_history(const fs::path& path, const std::string& name, const std::vector<double>& times,
                   const std::vector<GridFunction>& history) {
  Table t{{"t", "x", name}, {}};
  for (std::size_t i = 0; i < history.size(); ++i)
    for (std::size_t j = 0; j < history[i].size(); ++j)
      t.rows.push_back({times.at(i), history[i].grid.point(j), history[i][j]});
  write_csv(path, t);
}

void write_curve(const fs::path& path, const Curve& c) {
  const PeriodicGrid& g = grid_of(c);
  Table t;
  nlohmann::json meta{{"geometry", geometry_name(c)}, {"period", g.length()}, {"n", g.n()}};
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EuclideanCurve>) {
          t.header = {"x", "u1", "u2", "u3"};
          for (std::size_t j = 0; j < g.n(); ++j)
            t.rows.push_back({g.point(j), v.coords[0][j], v.coords[1][j], v.coords[2][j]});
        } else if constexpr (std::is_same_v<T, ProjectiveCurve>) {
          t.header = {"x", "u"};
          const GridFunction u = v.values();
          for (std::size_t j = 0; j < g.n(); ++j) t.rows.push_back({g.point(j), u[j]});
          meta["slope"] = v.slope;
        } else if constexpr (std::is_same_v<T, StarCurve>) {
          t.header = {"x", "g1", "g2"};
          const auto gam = v.derivative(0);
          for (std::size_t j = 0; j < g.n(); ++j) t.rows.push_back({g.point(j), gam[0][j], gam[1][j]});
          meta["generator"] = {{v.generator(0, 0), v.generator(0, 1)}, {v.generator(1, 0), v.generator(1, 1)}};
          const Eigen::Matrix2d m = v.monodromy();
          meta["monodromy"] = {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
        } else {
          const std::size_t d = v.dim();
          t.header = {"x"};
          for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = i; k < d; ++k) t.header.push_back("m" + std::to_string(i + 1) + std::to_string(k + 1));
          for (std::size_t j = 0; j < g.n(); ++j) {
            const Eigen::MatrixXd u = v.value(j);
            std::vector<double> r{g.point(j)};
            for (std::size_t i = 0; i < d; ++i)
              for (std::size_t k = i; k < d; ++k) r.push_back(u(Eigen::Index(i), Eigen::Index(k)));
            t.rows.push_back(std::move(r));
          }
          std::vector<std::vector<double>> s(d, std::vector<double>(d));
          for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k) s[i][k] = v.slope(Eigen::Index(i), Eigen::Index(k));
          meta["slope"] = s;
          meta["dim"] = d;
        }
      },
      c);
  write_csv(path, t);
  write_json(sidecar(path), meta);
}

Curve read_curve(const fs::path& path, const std::string& geometry) {
  const Table t = read_csv(path);
  nlohmann::json meta;
  if (fs::exists(sidecar(path))) {
    meta = read_json(sidecar(path));
    if (meta.contains("geometry") && meta["geometry"] != geometry)
      throw Error(ErrorKind::GeometryMismatch, path.string() + ": sidecar says " + meta["geometry"].get<std::string>());
  }
  if (t.rows.empty() || t.header.empty() || t.header[0] != "x")
    throw Error(ErrorKind::InvalidInput, path.string() + ": first column must be x");
  const PeriodicGrid g = grid_from_nodes(column(t, 0), path);

  if (geometry == "euclidean") {
    expect_header(t, {"x", "u1", "u2", "u3"}, path);
    return EuclideanCurve({GridFunction(g, column(t, 1)), GridFunction(g, column(t, 2)), GridFunction(g, column(t, 3))});
  }
  if (geometry == "projective") {
    expect_header(t, {"x", "u"}, path);
    const auto u = column(t, 1);
    if (meta.contains("slope")) {
      const double m = meta["slope"].get<double>();
      std::vector<double> p(u.size());
      for (std::size_t j = 0; j < p.size(); ++j) p[j] = u[j] - m * g.point(j);
      return ProjectiveCurve(m, GridFunction(g, std::move(p)));
    }
    auto [m, p] = split_linear(g, u);
    return ProjectiveCurve(m, GridFunction(g, std::move(p)));
  }
  if (geometry == "star") {
    expect_header(t, {"x", "g1", "g2"}, path);
    Eigen::Matrix2d gen = Eigen::Matrix2d::Zero();
    if (meta.contains("generator"))
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) gen(i, k) = meta["generator"][i][k].get<double>();
    // Undo the twist to recover the periodic part.
    StarCurve probe({GridFunction(g), GridFunction(g)}, gen, Unchecked{});
    std::array<GridFunction, 2> p{GridFunction(g), GridFunction(g)};
    for (std::size_t j = 0; j < g.n(); ++j) {
      const Eigen::Vector2d v = probe.twist(-g.point(j)) * Eigen::Vector2d(t.rows[j][1], t.rows[j][2]);
      p[0][j] = v(0);
      p[1][j] = v(1);
    }
    return StarCurve(std::move(p), gen);
  }
  if (geometry == "lagrangian") {
    const std::size_t entries = t.header.size() - 1;
    std::size_t d = 0;
    while (d * (d + 1) / 2 < entries) ++d;
    if (d * (d + 1) / 2 != entries) throw Error(ErrorKind::InvalidInput, path.string() + ": not an upper triangle");
    std::vector<std::string> want{"x"};
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = i; k < d; ++k) want.push_back("m" + std::to_string(i + 1) + std::to_string(k + 1));
    expect_header(t, want, path);
    Eigen::MatrixXd slope = Eigen::MatrixXd::Zero(Eigen::Index(d), Eigen::Index(d));
    std::vector<Eigen::MatrixXd> p(g.n(), slope);
    std::size_t col = 1;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = i; k < d; ++k, ++col) {
        auto v = column(t, col);
        double m;
        std::vector<double> per;
        if (meta.contains("slope")) {
          m = meta["slope"][i][k].get<double>();
          per = v;
          for (std::size_t j = 0; j < per.size(); ++j) per[j] -= m * g.point(j);
        } else {
          std::tie(m, per) = split_linear(g, v);
        }
        slope(Eigen::Index(i), Eigen::Index(k)) = slope(Eigen::Index(k), Eigen::Index(i)) = m;
        for (std::size_t j = 0; j < g.n(); ++j)
          p[j](Eigen::Index(i), Eigen::Index(k)) = p[j](Eigen::Index(k), Eigen::Index(i)) = per[j];
      }
    return LagrangianCurve(slope, std::move(p), g);
  }
  throw Error(ErrorKind::Config, "unknown geometry '" + geometry + "'");
}

void write_matrix_field(const fs::path& path, const MatrixField& m) {
  const std::size_t d = m.rows();
  Table t{{"x"}, {}};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) t.header.push_back("a" + std::to_string(i + 1) + std::to_string(k + 1));
  for (std::size_t j = 0; j < m.size(); ++j) {
    std::vector<double> r{m.grid.point(j)};
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) r.push_back(m.values[j](Eigen::Index(i), Eigen::Index(k)));
    t.rows.push_back(std::move(r));
  }
  write_csv(path, t);
  nlohmann::json meta{{"rows", d}, {"period", m.grid.length()}, {"n", m.grid.n()}};
  meta["lambda"] = m.lambda ? nlohmann::json(*m.lambda) : nlohmann::json(nullptr);
  write_json(sidecar(path), meta);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Config, path.string() + ": " + e.what());
  }
}

}  // namespace geomflow::io
