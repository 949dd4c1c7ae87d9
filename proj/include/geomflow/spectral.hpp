#pragma once

// Pseudo-spectral calculus on a uniform periodic grid.

#include <span>
#include <vector>

#include "geomflow/grid.hpp"

namespace geomflow {

inline constexpr int kMaxDerivativeOrder = 5;

/// order-th derivative by Fourier-symbol multiplication. Odd orders drop the
/// Nyquist mode so that D stays real and skew on even grids.
GridFunction derivative(const GridFunction& f, int order = 1);
ComplexGridFunction derivative(const ComplexGridFunction& f, int order = 1);

/// Returns {f, f', ..., f^(max_order)} sharing a single forward transform.
std::vector<GridFunction> jet(const GridFunction& f, int max_order);

/// Periodic trapezoid rule, dx * sum f_j.
double integrate(const GridFunction& f);
cplx integrate(const ComplexGridFunction& f);
double inner(const GridFunction& a, const GridFunction& b);
double l2_norm(const GridFunction& f);

enum class MeanHandling { KeepLinearPart, RemoveMean };

struct Antiderivative {
  GridFunction values;  // F at the nodes, linear part included
  double slope;         // mean of f; F(x) - slope * x is periodic
};

/// F with F' = f and F(0) = base_value. The mean of f becomes a declared linear
/// part unless the caller asks for it to be dropped.
Antiderivative antiderivative(const GridFunction& f, double base_value,
                              MeanHandling mean = MeanHandling::KeepLinearPart);

/// Trigonometric interpolant of f evaluated at arbitrary points (period-wrapped).
std::vector<double> evaluate_at(const GridFunction& f, std::span<const double> xs);

/// 2/3-rule truncation: zero every mode with |k| > n/3.
GridFunction dealias(const GridFunction& f);
/// Keeps the modes |k| <= fraction * n/2 and zeroes the rest.
GridFunction band_limit(const GridFunction& f, double fraction);

/// Coefficients c_k, k = 0..n/2, of the real transform scaled by 1/n.
std::vector<cplx> fourier_coefficients(const GridFunction& f);
/// Inverse of fourier_coefficients.
GridFunction from_fourier_coefficients(const PeriodicGrid& g, const std::vector<cplx>& coeffs);

}  // namespace geomflow
