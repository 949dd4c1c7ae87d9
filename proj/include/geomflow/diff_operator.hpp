#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geomflow/grid.hpp"

namespace geomflow {

/// One factor of a composition chain: d/dx or multiplication by a field.
struct Primitive {
  enum class Kind { D, Multiply };
  Kind kind;
  std::optional<GridFunction> field;  // set iff kind == Multiply
  std::string label;                  // "D" or the field's name

  static Primitive d();
  static Primitive multiply(GridFunction field, std::string label);
};

/// coeff * P_1 o P_2 o ... o P_m, applied right to left. An empty factor list is
/// the scalar operator coeff.
struct Chain {
  double coeff = 1.0;
  std::vector<Primitive> factors;

  int derivative_count() const noexcept;
  std::vector<std::string> labels() const;
};

/// Linear differential operator represented as a sum of composition chains.
class DiffOperator {
 public:
  explicit DiffOperator(PeriodicGrid grid) : grid_(grid) {}

  static DiffOperator zero(const PeriodicGrid& g) { return DiffOperator(g); }
  static DiffOperator scalar(const PeriodicGrid& g, double c);
  static DiffOperator d(const PeriodicGrid& g, int power = 1);
  static DiffOperator multiply(const GridFunction& field, std::string label);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  const std::vector<Chain>& chains() const noexcept { return chains_; }
  bool empty() const noexcept { return chains_.empty(); }

  GridFunction apply(const GridFunction& f) const;
  GridFunction operator()(const GridFunction& f) const { return apply(f); }

  /// Formal L2 adjoint: chains reversed, D* = -D, multiplication self-adjoint.
  DiffOperator adjoint() const;

  /// True when every multiplication field is constant to roundoff.
  bool constant_coefficient() const;
  /// Fourier symbol at integer mode k (constant-coefficient operators only),
  /// consistent with the discrete apply() including the Nyquist convention.
  cplx symbol(std::size_t k) const;

  /// If every chain starts with D, returns W with this = D o W.
  std::optional<DiffOperator> strip_leading_derivative() const;

  DiffOperator& operator+=(const DiffOperator& o);
  DiffOperator& operator-=(const DiffOperator& o);
  DiffOperator& operator*=(double s);

  /// Composition (this o o), distributing over chains.
  DiffOperator compose(const DiffOperator& o) const;

  /// Exact structural equality: same chains, coefficients and field samples.
  friend bool operator==(const DiffOperator& a, const DiffOperator& b);

 private:
  PeriodicGrid grid_;
  std::vector<Chain> chains_;
};

DiffOperator operator+(DiffOperator a, const DiffOperator& b);
DiffOperator operator-(DiffOperator a, const DiffOperator& b);
DiffOperator operator*(double s, DiffOperator a);
DiffOperator operator*(const DiffOperator& a, const DiffOperator& b);  // composition

/// m x m matrix of scalar operators acting on vectors of grid functions.
class BlockOperator {
 public:
  BlockOperator(std::size_t m, const PeriodicGrid& g);

  std::size_t size() const noexcept { return m_; }
  const PeriodicGrid& grid() const noexcept { return grid_; }
  DiffOperator& at(std::size_t row, std::size_t col) { return entries_[row * m_ + col]; }
  const DiffOperator& at(std::size_t row, std::size_t col) const { return entries_[row * m_ + col]; }

  std::vector<GridFunction> apply(const std::vector<GridFunction>& f) const;
  BlockOperator adjoint() const;

  friend bool operator==(const BlockOperator& a, const BlockOperator& b);

 private:
  std::size_t m_;
  PeriodicGrid grid_;
  std::vector<DiffOperator> entries_;
};

}  // namespace geomflow
