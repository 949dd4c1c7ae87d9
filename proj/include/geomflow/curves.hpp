#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <variant>
#include <vector>

#include "geomflow/grid.hpp"

namespace geomflow {

/// Skip validation; used for diagnostics on data known to be degenerate.
struct Unchecked {};

/// Closed space curve sampled at the grid nodes.
struct EuclideanCurve {
  PeriodicGrid grid;
  std::array<GridFunction, 3> coords;

  EuclideanCurve(std::array<GridFunction, 3> c);
  EuclideanCurve(std::array<GridFunction, 3> c, Unchecked);

  static EuclideanCurve sample(const PeriodicGrid& g, const std::function<Eigen::Vector3d(double)>& f);

  Eigen::Vector3d point(std::size_t j) const { return {coords[0][j], coords[1][j], coords[2][j]}; }
  /// Derivative of the given order of all three coordinates.
  std::array<GridFunction, 3> derivative(int order) const;
  GridFunction speed() const;
};

/// u(x) = slope * x + periodic(x): a curve in RP^1 whose monodromy is the
/// translation u -> u + slope * L.
struct ProjectiveCurve {
  PeriodicGrid grid;
  double slope = 1.0;
  GridFunction periodic;

  ProjectiveCurve(double slope, GridFunction periodic);
  ProjectiveCurve(double slope, GridFunction periodic, Unchecked);

  GridFunction values() const;
  /// u^(order) for order >= 1 (periodic).
  GridFunction derivative(int order) const;
};

/// Planar star-shaped curve gamma(x) = exp(x G) * periodic(x). G is trace-free,
/// so exp(L G) is the monodromy and det is unaffected by the twist.
struct StarCurve {
  PeriodicGrid grid;
  std::array<GridFunction, 2> periodic;
  Eigen::Matrix2d generator = Eigen::Matrix2d::Zero();

  StarCurve(std::array<GridFunction, 2> periodic, Eigen::Matrix2d generator = Eigen::Matrix2d::Zero());
  StarCurve(std::array<GridFunction, 2> periodic, Eigen::Matrix2d generator, Unchecked);

  Eigen::Matrix2d twist(double x) const;
  Eigen::Matrix2d monodromy() const { return twist(grid.length()); }
  /// gamma^(order) at every node, order 0..4.
  std::array<GridFunction, 2> derivative(int order) const;
  /// det(gamma, gamma') at every node.
  GridFunction wronskian() const;
  bool normalized(double tol = 1e-8) const;
};

/// Curve of symmetric m x m matrices u(x) = slope * x + periodic(x).
struct LagrangianCurve {
  PeriodicGrid grid;
  Eigen::MatrixXd slope;
  std::vector<Eigen::MatrixXd> periodic;  // one symmetric matrix per node

  LagrangianCurve(Eigen::MatrixXd slope, std::vector<Eigen::MatrixXd> periodic, PeriodicGrid grid);
  LagrangianCurve(Eigen::MatrixXd slope, std::vector<Eigen::MatrixXd> periodic, PeriodicGrid grid, Unchecked);

  std::size_t dim() const noexcept { return std::size_t(slope.rows()); }
  GridFunction entry(std::size_t i, std::size_t j) const;  // periodic part only
  Eigen::MatrixXd value(std::size_t node) const;
  /// u^(order) at every node, order 1..5.
  std::vector<Eigen::MatrixXd> derivative(int order) const;
};

using Curve = std::variant<EuclideanCurve, ProjectiveCurve, StarCurve, LagrangianCurve>;

const char* geometry_name(const Curve& c) noexcept;
const PeriodicGrid& grid_of(const Curve& c) noexcept;

/// Resamples at equal arc-length steps; the new period is the total length and
/// the node at x = 0 is kept.
EuclideanCurve reparametrize_arclength(const EuclideanCurve& c);

/// gamma = (u')^{-1/2} (1, u), with the translation monodromy carried by G.
StarCurve projective_to_star(const ProjectiveCurve& u);
/// u = gamma_2 / gamma_1, returned as slope + periodic part.
ProjectiveCurve star_to_projective(const StarCurve& c);

struct GenericityReport {
  std::string geometry;
  std::string margin_name;
  double margin = 0.0;
  double tolerance = 1e-8;
  bool pass = false;
};

GenericityReport check_generic(const EuclideanCurve& c, double tol = 1e-8);
GenericityReport check_generic(const ProjectiveCurve& c, double tol = 1e-8);
GenericityReport check_generic(const StarCurve& c, double tol = 1e-8);
GenericityReport check_generic(const LagrangianCurve& c, double tol = 1e-8);
GenericityReport check_generic(const Curve& c, double tol = 1e-8);

}  // namespace geomflow
