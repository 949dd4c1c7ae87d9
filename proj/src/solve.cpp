#include "geomflow/solve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "geomflow/error.hpp"
#include "geomflow/spectral.hpp"

namespace geomflow {

namespace {

GridFunction solve_by_symbol(const DiffOperator& op, const GridFunction& rhs, const SolveOptions& opts,
                             double rhs_norm) {
  auto c = fourier_coefficients(rhs);
  double max_symbol = 0.0;
  std::vector<cplx> sym(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    sym[k] = op.symbol(k);
    max_symbol = std::max(max_symbol, std::abs(sym[k]));
  }
  if (max_symbol == 0.0) throw Error(ErrorKind::SingularOperator, "operator symbol vanishes identically");
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (std::abs(sym[k]) <= 1e-12 * max_symbol) {
      const double weight = (k == 0 || ((rhs.size() % 2 == 0) && k == rhs.size() / 2)) ? 1.0 : 2.0;
      const double projection = weight * std::abs(c[k]);
      if (projection > opts.solvability_tol * rhs_norm)
        throw Error(ErrorKind::Unsolvable, "right-hand side has a component outside the operator range (mode " +
                                               std::to_string(k) + ")",
                    projection);
      c[k] = 0.0;
    } else {
      c[k] /= sym[k];
    }
  }
  return from_fourier_coefficients(rhs.grid, c);
}

GridFunction solve_dense(const DiffOperator& op, const GridFunction& rhs, const SolveOptions& opts,
                         double rhs_norm) {
  const std::size_t n = rhs.size();
  Eigen::MatrixXd a(n, n);
  GridFunction unit(rhs.grid);
  for (std::size_t j = 0; j < n; ++j) {
    unit[j] = 1.0;
    const GridFunction col = op.apply(unit);
    for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
    unit[j] = 0.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) throw Error(ErrorKind::SingularOperator, "discretized operator is zero");
  const double cutoff = 1e-10 * s(0);
  Eigen::Map<const Eigen::VectorXd> b(rhs.values.data(), n);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double proj = svd.matrixU().col(i).dot(b);
    if (s(i) > cutoff) {
      y += (proj / s(i)) * svd.matrixV().col(i);
    } else {
      // Unit-L2 left singular vector; compare its weight with the sup norm of rhs.
      const double projection = std::abs(proj) / std::sqrt(double(n));
      if (projection > opts.solvability_tol * rhs_norm)
        throw Error(ErrorKind::Unsolvable, "right-hand side violates a solvability condition", projection);
      null_cols.push_back(i);
    }
  }
  // Zero-mean convention: shift along the kernel with the smallest correction.
  if (!null_cols.empty()) {
    Eigen::VectorXd means(null_cols.size());
    for (std::size_t i = 0; i < null_cols.size(); ++i) means(i) = svd.matrixV().col(null_cols[i]).mean();
    const double m2 = means.squaredNorm();
    if (m2 > 1e-20) {
      const Eigen::VectorXd coef = -(y.mean() / m2) * means;
      for (std::size_t i = 0; i < null_cols.size(); ++i) y += coef(i) * svd.matrixV().col(null_cols[i]);
    }
  }
  return {rhs.grid, std::vector<double>(y.data(), y.data() + n)};
}

}  // namespace

GridFunction solve_operator(const DiffOperator& op, const GridFunction& rhs, const SolveOptions& opts) {
  require_same_grid(op.grid(), rhs.grid, "solve_operator");
  if (!rhs.all_finite()) throw Error(ErrorKind::InvalidInput, "solve_operator: non-finite right-hand side");
  const double rhs_norm = rhs.max_abs();
  if (rhs_norm == 0.0) return GridFunction(rhs.grid);
  if (op.empty()) throw Error(ErrorKind::SingularOperator, "zero operator");

  GridFunction y = op.constant_coefficient() ? solve_by_symbol(op, rhs, opts, rhs_norm)
                                             : solve_dense(op, rhs, opts, rhs_norm);
  const double residual = (op.apply(y) - rhs).max_abs() / rhs_norm;
  if (!(residual < opts.residual_tol))
    throw Error(ErrorKind::SingularOperator, "solution misses the residual tolerance", residual);
  return y;
}

}  // namespace geomflow
