#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "geomflow/curves.hpp"
#include "geomflow/flows.hpp"
#include "geomflow/matrix_field.hpp"

namespace geomflow {

/// phi_x = A phi, phi_t = B phi sampled at equally spaced times.
struct AknsPair {
  std::string algebra;  // "sl2" or "so3"
  double lambda = 0.0;
  std::vector<double> times;
  std::vector<MatrixField> A;
  std::vector<MatrixField> B;
  bool periodic_in_x = true;  // false: B_x by one-sided-safe finite differences
};

struct ZeroCurvature {
  double residual = 0.0;              // max |A_t - B_x - [B, A]| over interior snapshots
  std::vector<MatrixField> fields;    // the residual at each interior snapshot
  std::vector<std::size_t> snapshots; // indices of those snapshots
};

/// A_t from the 4th-order central stencil over the stored snapshots.
ZeroCurvature zero_curvature(const AknsPair& pair);
inline double zero_curvature_residual(const AknsPair& pair) { return zero_curvature(pair).residual; }

struct KdvPairOptions {
  double q_sign = 1.0;  // q = q_sign * (S/2 + lambda^2)
};

/// A = [[-l, -1], [-q, l]],
/// B = [[-q_x/2 - l q + 2 l^3, -q + 2 l^2], [q_xx/2 + l q_x + q(-q + 2 l^2), q_x/2 + l q - 2 l^3]].
AknsPair kdv_akns_pair(const std::vector<ProjectiveCurve>& history, const std::vector<double>& times, double lambda,
                       const KdvPairOptions& opts = {});
AknsPair kdv_akns_pair(const FlowRun& run, double lambda, const KdvPairOptions& opts = {});

/// Euclidean pair A = [[0, kappa, 0], [-kappa, 0, tau - l], [0, -(tau - l), 0]] along
/// a run of closed curves. The frame rho_l (rows) solves rho_x = A rho from the
/// Frenet frame at x = 0; B = rho_t rho^{-1} is measured from the snapshots.
AknsPair euclidean_akns_pair(const FlowRun& run, double lambda);

/// K -> g K g^{-1} for constant g.
MatrixField gauge_transform(const MatrixField& k, const Eigen::MatrixXd& g);
/// K -> g_x g^{-1} + g K g^{-1} for an x-dependent gauge.
MatrixField gauge_transform(const MatrixField& k, const MatrixField& g);
/// Conjugates both halves of a pair by a constant g.
AknsPair gauge_transform(const AknsPair& pair, const Eigen::MatrixXd& g);

}  // namespace geomflow
