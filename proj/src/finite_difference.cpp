#include "geomflow/finite_difference.hpp"

#include <algorithm>

#include "geomflow/error.hpp"

namespace geomflow::fd {

std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes, int max_order) {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

std::vector<double> derivative(std::span<const double> samples, double spacing, int order, int accuracy) {
  // Centred stencil width for this order/accuracy; one-sided ends reuse it.
  const int width = 2 * ((order + 1) / 2) - 1 + accuracy;
  const int n = static_cast<int>(samples.size());
  if (n < width) throw Error(ErrorKind::InvalidInput, "too few samples for the finite-difference stencil", n);
  std::vector<double> out(n);
  std::vector<double> nodes(width);
  for (int i = 0; i < n; ++i) {
    const int start = std::clamp(i - width / 2, 0, n - width);
    for (int s = 0; s < width; ++s) nodes[s] = double(start + s - i);
    const auto w = fornberg_weights(0.0, nodes, order);
    double acc = 0.0;
    for (int s = 0; s < width; ++s) acc += w[order][s] * samples[start + s];
    out[i] = acc;
  }
  double scale = 1.0;
  for (int k = 0; k < order; ++k) scale *= spacing;
  for (double& v : out) v /= scale;
  return out;
}

}  // namespace geomflow::fd
