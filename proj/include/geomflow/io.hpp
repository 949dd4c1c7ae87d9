#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "geomflow/curves.hpp"
#include "geomflow/matrix_field.hpp"

namespace geomflow::io {

namespace fs = std::filesystem;

/// Doubles are written with 17 significant digits so that they round-trip.
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Throws InvalidInput naming the 1-based line of the first malformed row.
Table read_csv(const fs::path& path);
void write_csv(const fs::path& path, const Table& t);

void write_grid_function(const fs::path& path, const GridFunction& f, const std::string& name = "value");
void write_grid_function(const fs::path& path, const ComplexGridFunction& f);
/// Two columns, x and a named value.
GridFunction read_grid_function(const fs::path& path);

/// Columns x,<name>... for several fields on one grid.
void write_fields(const fs::path& path, const std::map<std::string, GridFunction>& fields);
/// Long-format time series: t,x,<name>.
void write_history(const fs::path& path, const std::string& name, const std::vector<double>& times,
                   const std::vector<GridFunction>& history);

/// Curve CSV plus a JSON sidecar (<path>.json) with geometry, period and monodromy.
void write_curve(const fs::path& path, const Curve& c);
/// Reads a curve of the given geometry. Without a sidecar the period comes from
/// the node spacing and a linear part is fitted by least squares.
Curve read_curve(const fs::path& path, const std::string& geometry);

/// x,a11,a12,... row-major plus a JSON sidecar with lambda.
void write_matrix_field(const fs::path& path, const MatrixField& m);

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

}  // namespace geomflow::io
