#pragma once

#include <span>
#include <vector>

namespace geomflow::fd {

/// Fornberg weights for the derivatives 0..max_order at z from the stencil nodes.
/// Result is indexed [order][node].
std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes, int max_order);

/// Derivative of the given order of uniformly spaced (non-periodic) samples,
/// with the requested accuracy order. Interior points use centred stencils and
/// the ends shift to one-sided stencils of the same width.
std::vector<double> derivative(std::span<const double> samples, double spacing, int order, int accuracy = 6);

}  // namespace geomflow::fd
