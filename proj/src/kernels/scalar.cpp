#include "geomflow/kernels.hpp"

namespace geomflow::kernels::scalar {

void add_scaled(std::span<double> y, double a, std::span<const double> x) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void lincomb(std::span<double> out, std::span<const double> x, double a, std::span<const double> y) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * y[i];
}

void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

void spectral_scale(std::span<cplx> c, std::span<const double> factor, int quarter_turns) {
  const int q = ((quarter_turns % 4) + 4) % 4;
  const std::size_t n = c.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double re = c[k].real() * factor[k];
    const double im = c[k].imag() * factor[k];
    switch (q) {
      case 0: c[k] = {re, im}; break;
      case 1: c[k] = {-im, re}; break;
      case 2: c[k] = {-re, -im}; break;
      default: c[k] = {im, -re}; break;
    }
  }
}

}  // namespace geomflow::kernels::scalar
