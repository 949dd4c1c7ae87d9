#include "geomflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "geomflow/error.hpp"
#include "geomflow/kernels.hpp"

namespace geomflow {

PeriodicGrid::PeriodicGrid(std::size_t n, double length) : n_(n), length_(length) {
  if (n < 8) throw Error(ErrorKind::InvalidInput, "grid needs at least 8 points", double(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw Error(ErrorKind::InvalidInput, "grid period must be positive and finite", length);
}

std::vector<double> PeriodicGrid::points() const {
  std::vector<double> x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = point(j);
  return x;
}

double PeriodicGrid::wavenumber(double k) const noexcept {
  return 2.0 * std::numbers::pi * k / length_;
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where) {
  if (!(a == b)) throw Error(ErrorKind::ShapeMismatch, std::string(where) + ": grids differ");
}

GridFunction::GridFunction(PeriodicGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.n())
    throw Error(ErrorKind::ShapeMismatch, "sample count does not match grid", double(values.size()));
}

GridFunction::GridFunction(PeriodicGrid g, double fill) : grid(g), values(g.n(), fill) {}

GridFunction GridFunction::sample(const PeriodicGrid& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) v[j] = f(g.point(j));
  return {g, std::move(v)};
}

double GridFunction::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min() const noexcept { return *std::min_element(values.begin(), values.end()); }
double GridFunction::max() const noexcept { return *std::max_element(values.begin(), values.end()); }

double GridFunction::mean() const noexcept {
  return kernels::sum(values) / static_cast<double>(values.size());
}

bool GridFunction::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_grid(grid, o.grid, "operator+=");
  kernels::add_scaled(values, 1.0, o.values);
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_grid(grid, o.grid, "operator-=");
  kernels::add_scaled(values, -1.0, o.values);
  return *this;
}

GridFunction& GridFunction::operator*=(const GridFunction& o) {
  require_same_grid(grid, o.grid, "operator*=");
  kernels::multiply(values, values, o.values);
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

GridFunction& GridFunction::operator+=(double s) {
  for (double& v : values) v += s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }
GridFunction operator*(GridFunction a, double s) { return a *= s; }
GridFunction operator+(GridFunction a, double s) { return a += s; }
GridFunction operator-(GridFunction a) { return a *= -1.0; }

GridFunction operator/(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid, b.grid, "operator/");
  GridFunction r(a.grid);
  for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] / b[j];
  return r;
}

GridFunction map(const GridFunction& f, const std::function<double(double)>& fn) {
  GridFunction r(f.grid);
  for (std::size_t j = 0; j < f.size(); ++j) r[j] = fn(f[j]);
  return r;
}

ComplexGridFunction::ComplexGridFunction(PeriodicGrid g, std::vector<cplx> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.n())
    throw Error(ErrorKind::ShapeMismatch, "sample count does not match grid", double(values.size()));
}

GridFunction ComplexGridFunction::real() const {
  GridFunction r(grid);
  for (std::size_t j = 0; j < size(); ++j) r[j] = values[j].real();
  return r;
}

GridFunction ComplexGridFunction::imag() const {
  GridFunction r(grid);
  for (std::size_t j = 0; j < size(); ++j) r[j] = values[j].imag();
  return r;
}

GridFunction ComplexGridFunction::abs() const {
  GridFunction r(grid);
  for (std::size_t j = 0; j < size(); ++j) r[j] = std::abs(values[j]);
  return r;
}

double ComplexGridFunction::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

ComplexGridFunction make_complex(const GridFunction& re, const GridFunction& im) {
  require_same_grid(re.grid, im.grid, "make_complex");
  std::vector<cplx> v(re.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = {re[j], im[j]};
  return {re.grid, std::move(v)};
}

}  // namespace geomflow
