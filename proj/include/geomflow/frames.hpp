#pragma once

#include <array>
#include <string>

#include "geomflow/curves.hpp"
#include "geomflow/invariants.hpp"
#include "geomflow/matrix_field.hpp"

namespace geomflow {

struct FrenetFrame {
  std::array<GridFunction, 3> T, N, B;
};

struct PSL2Frame {
  MatrixField rho;
  double lambda = 0.0;
};

/// Max deviations of the normalization equations rho.u = 0, rho.u_1 = 1,
/// rho.u_2 = 2 lambda, and of det rho = 1.
struct NormalizationResiduals {
  double det = 0.0;
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
  double max() const { return std::max({det, value, first, second}); }
};

struct SerretFrenetMatrix {
  MatrixField K;
  std::string geometry;
  double residual = 0.0;  // ||rho_x - K rho|| (PSL2) or ||rho_x - rho K|| (Euclidean)
};

FrenetFrame frenet_frame(const EuclideanCurve& c);
/// max over the three Frenet relations, derivatives taken in arc length.
double frenet_residual(const EuclideanCurve& c, const FrenetFrame& f, const EuclideanInvariants& inv);

/// rho = [[1,0],[u2/(2u1) - lambda, 1]] diag(u1^{-1/2}, u1^{1/2}) [[1,-u],[0,1]].
PSL2Frame psl2_frame(const ProjectiveCurve& u, double lambda);
NormalizationResiduals psl2_normalization(const PSL2Frame& frame, const ProjectiveCurve& u);
/// Product-rule x-derivative of the closed-form frame.
MatrixField psl2_frame_derivative(const ProjectiveCurve& u, double lambda);
/// K = [[-lambda, -1], [S/2 + lambda^2, lambda]], checked against rho_x = K rho.
SerretFrenetMatrix psl2_serret_frenet(const PSL2Frame& frame, const ProjectiveCurve& u);

/// Affine frame [[1, 0], [u, (T N B)]] as a 4 x 4 field.
MatrixField euclidean_frame(const EuclideanCurve& c);
/// K = [[0,0,0,0],[1,0,-kappa,0],[0,kappa,0,-tau],[0,0,tau,0]], checked against rho_x = rho K.
SerretFrenetMatrix euclidean_serret_frenet(const EuclideanCurve& c);

}  // namespace geomflow
