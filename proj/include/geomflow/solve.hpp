#pragma once

#include "geomflow/diff_operator.hpp"

namespace geomflow {

struct SolveOptions {
  double solvability_tol = 1e-8;  // relative to ||rhs||_inf
  double residual_tol = 1e-8;     // ||L y - rhs||_inf / ||rhs||_inf
};

/// Solves L y = rhs on periodic functions. Components of y in the kernel of L are
/// fixed by the zero-mean convention. Constant-coefficient operators are inverted
/// by Fourier-symbol division; variable coefficients go through a dense SVD of
/// the discretized operator.
///
/// Throws Unsolvable (value = offending projection of rhs onto the cokernel)
/// and SingularOperator when no solution meets the residual tolerance.
GridFunction solve_operator(const DiffOperator& op, const GridFunction& rhs, const SolveOptions& opts = {});

}  // namespace geomflow
