#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "geomflow/grid.hpp"

namespace geomflow {

/// Matrix-valued grid function (Serret-Frenet matrices, frames, AKNS pairs).
struct MatrixField {
  PeriodicGrid grid;
  std::vector<Eigen::MatrixXd> values;  // one m x m matrix per node
  std::optional<double> lambda;

  MatrixField(PeriodicGrid g, std::size_t m);
  MatrixField(PeriodicGrid g, std::vector<Eigen::MatrixXd> v, std::optional<double> lam = std::nullopt);

  std::size_t rows() const noexcept { return values.empty() ? 0 : std::size_t(values.front().rows()); }
  std::size_t size() const noexcept { return values.size(); }

  GridFunction entry(std::size_t i, std::size_t j) const;
  void set_entry(std::size_t i, std::size_t j, const GridFunction& f);

  /// Largest absolute entry over all nodes.
  double max_abs() const noexcept;
  bool all_finite() const noexcept;
};

/// Entrywise spectral x-derivative (requires periodic entries).
MatrixField derivative(const MatrixField& m);
MatrixField operator+(const MatrixField& a, const MatrixField& b);
MatrixField operator-(const MatrixField& a, const MatrixField& b);
/// Pointwise products and commutators.
MatrixField pointwise_product(const MatrixField& a, const MatrixField& b);
MatrixField commutator(const MatrixField& a, const MatrixField& b);

}  // namespace geomflow
