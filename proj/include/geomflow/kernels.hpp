#pragma once

// Data-parallel inner loops shared by the spectral calculus and the time
// stepper. Each kernel has a portable scalar reference and an AVX2 variant; the
// variant is chosen once at startup from the CPU feature set and can be forced
// with GEOMFLOW_SIMD=scalar|avx2.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace geomflow::kernels {

using cplx = std::complex<double>;

struct Backend {
  std::string_view name;
  // y[i] += a * x[i]
  void (*add_scaled)(std::span<double> y, double a, std::span<const double> x);
  // out[i] = x[i] + a * y[i]
  void (*lincomb)(std::span<double> out, std::span<const double> x, double a,
                  std::span<const double> y);
  // out[i] = a[i] * b[i]
  void (*multiply)(std::span<double> out, std::span<const double> a, std::span<const double> b);
  double (*sum)(std::span<const double> x);
  // c[k] *= factor[k] * i^quarter_turns
  void (*spectral_scale)(std::span<cplx> c, std::span<const double> factor, int quarter_turns);
};

namespace scalar {
void add_scaled(std::span<double> y, double a, std::span<const double> x);
void lincomb(std::span<double> out, std::span<const double> x, double a, std::span<const double> y);
void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
void spectral_scale(std::span<cplx> c, std::span<const double> factor, int quarter_turns);
}  // namespace scalar

namespace avx2 {
bool available() noexcept;
void add_scaled(std::span<double> y, double a, std::span<const double> x);
void lincomb(std::span<double> out, std::span<const double> x, double a, std::span<const double> y);
void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
void spectral_scale(std::span<cplx> c, std::span<const double> factor, int quarter_turns);
}  // namespace avx2

const Backend& scalar_backend() noexcept;
const Backend& avx2_backend() noexcept;

/// The backend selected for this process.
const Backend& active() noexcept;

inline void add_scaled(std::span<double> y, double a, std::span<const double> x) {
  active().add_scaled(y, a, x);
}
inline void lincomb(std::span<double> out, std::span<const double> x, double a,
                    std::span<const double> y) {
  active().lincomb(out, x, a, y);
}
inline void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  active().multiply(out, a, b);
}
inline double sum(std::span<const double> x) { return active().sum(x); }
inline void spectral_scale(std::span<cplx> c, std::span<const double> factor, int quarter_turns) {
  active().spectral_scale(c, factor, quarter_turns);
}

}  // namespace geomflow::kernels
