#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "geomflow/curves.hpp"

namespace geomflow {

struct EuclideanInvariants {
  GridFunction kappa;
  GridFunction tau;
};

struct NaturalInvariants {
  GridFunction nu;
  GridFunction eta;
  ComplexGridFunction phi;
  double gauge_base = 0.0;   // x where the torsion primitive vanishes
  double phase_slope = 0.0;  // mean torsion, kept as a linear phase
};

struct LagrangianSchwarzian {
  std::vector<Eigen::MatrixXd> s_matrix;
  std::vector<GridFunction> s_d;        // eigenvalues, ascending at x = 0, tracked after
  std::vector<Eigen::MatrixXd> theta;   // rows are eigenvectors: theta s theta^T = diag
  bool near_degenerate = false;         // eigenvalue gap fell below 1e-10 somewhere
};

struct CentroAffineInvariant {
  GridFunction p;
  double residual = 0.0;  // max |gamma'' - p gamma|
};

/// kappa = |u' x u''| / |u'|^3 and tau = det(u', u'', u''') / |u' x u''|^2; on
/// arc-length curves these are |u''| and det(u', u'', u''') / |u''|^2.
EuclideanInvariants curvature_torsion(const EuclideanCurve& c);

/// Phi = kappa exp(i int_base^x tau).
NaturalInvariants hasimoto(const EuclideanInvariants& inv, double base = 0.0);

/// S(u) = u'''/u' - 3/2 (u''/u')^2.
GridFunction schwarzian(const ProjectiveCurve& u);
/// Same formula from non-periodic samples via one-sided-safe 6th-order differences.
std::vector<double> schwarzian_window(std::span<const double> samples, double spacing);

LagrangianSchwarzian lagrangian_schwarzian(const LagrangianCurve& c);

/// p with gamma'' = p gamma, i.e. det(gamma'', gamma'); requires det(gamma, gamma') = 1 to tol.
CentroAffineInvariant centroaffine_curvature(const StarCurve& c, double tol = 1e-8);

}  // namespace geomflow
