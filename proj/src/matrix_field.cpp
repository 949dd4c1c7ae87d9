#include "geomflow/matrix_field.hpp"

#include <cmath>

#include "geomflow/error.hpp"
#include "geomflow/spectral.hpp"

namespace geomflow {

MatrixField::MatrixField(PeriodicGrid g, std::size_t m)
    : grid(g), values(g.n(), Eigen::MatrixXd::Zero(Eigen::Index(m), Eigen::Index(m))) {}

MatrixField::MatrixField(PeriodicGrid g, std::vector<Eigen::MatrixXd> v, std::optional<double> lam)
    : grid(g), values(std::move(v)), lambda(lam) {
  if (values.size() != grid.n())
    throw Error(ErrorKind::ShapeMismatch, "matrix field sample count does not match grid", double(values.size()));
  for (const auto& m : values)
    if (m.rows() != m.cols() || m.rows() != values.front().rows())
      throw Error(ErrorKind::ShapeMismatch, "matrix field samples must be square and equally sized");
}

GridFunction MatrixField::entry(std::size_t i, std::size_t j) const {
  GridFunction f(grid);
  for (std::size_t k = 0; k < size(); ++k) f[k] = values[k](Eigen::Index(i), Eigen::Index(j));
  return f;
}

void MatrixField::set_entry(std::size_t i, std::size_t j, const GridFunction& f) {
  require_same_grid(grid, f.grid, "MatrixField::set_entry");
  for (std::size_t k = 0; k < size(); ++k) values[k](Eigen::Index(i), Eigen::Index(j)) = f[k];
}

double MatrixField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

bool MatrixField::all_finite() const noexcept {
  for (const auto& v : values)
    if (!v.allFinite()) return false;
  return true;
}

MatrixField derivative(const MatrixField& m) {
  MatrixField out(m.grid, m.rows());
  out.lambda = m.lambda;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.rows(); ++j) out.set_entry(i, j, derivative(m.entry(i, j), 1));
  return out;
}

MatrixField operator+(const MatrixField& a, const MatrixField& b) {
  require_same_grid(a.grid, b.grid, "MatrixField::+");
  MatrixField out = a;
  for (std::size_t k = 0; k < a.size(); ++k) out.values[k] += b.values[k];
  return out;
}

MatrixField operator-(const MatrixField& a, const MatrixField& b) {
  require_same_grid(a.grid, b.grid, "MatrixField::-");
  MatrixField out = a;
  for (std::size_t k = 0; k < a.size(); ++k) out.values[k] -= b.values[k];
  return out;
}

MatrixField pointwise_product(const MatrixField& a, const MatrixField& b) {
  require_same_grid(a.grid, b.grid, "pointwise_product");
  MatrixField out = a;
  for (std::size_t k = 0; k < a.size(); ++k) out.values[k] = a.values[k] * b.values[k];
  return out;
}

MatrixField commutator(const MatrixField& a, const MatrixField& b) {
  require_same_grid(a.grid, b.grid, "commutator");
  MatrixField out = a;
  for (std::size_t k = 0; k < a.size(); ++k)
    out.values[k] = a.values[k] * b.values[k] - b.values[k] * a.values[k];
  return out;
}

}  // namespace geomflow
