#include "geomflow/kernels.hpp"

#if defined(GEOMFLOW_HAVE_AVX2_TU) && defined(__AVX2__)
#include <immintrin.h>
#define GEOMFLOW_AVX2_BODY 1
#else
#define GEOMFLOW_AVX2_BODY 0
#endif

namespace geomflow::kernels::avx2 {

#if GEOMFLOW_AVX2_BODY

bool available() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

void add_scaled(std::span<double> y, double a, std::span<const double> x) {
  const std::size_t n = y.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y.data() + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy);
    _mm256_storeu_pd(y.data() + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void lincomb(std::span<double> out, std::span<const double> x, double a, std::span<const double> y) {
  const std::size_t n = out.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r =
        _mm256_fmadd_pd(va, _mm256_loadu_pd(y.data() + i), _mm256_loadu_pd(x.data() + i));
    _mm256_storeu_pd(out.data() + i, r);
  }
  for (; i < n; ++i) out[i] = x[i] + a * y[i];
}

void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    _mm256_storeu_pd(out.data() + i, r);
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x.data() + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x.data() + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x.data() + i));
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i];
  return s;
}

// Complex values are stored interleaved (re, im); two coefficients per register.
void spectral_scale(std::span<cplx> c, std::span<const double> factor, int quarter_turns) {
  const int q = ((quarter_turns % 4) + 4) % 4;
  const std::size_t n = c.size();
  auto* data = reinterpret_cast<double*>(c.data());
  // Lane signs applied after the (re, im) swap for odd turns.
  const __m256d sign = q == 0   ? _mm256_set_pd(1, 1, 1, 1)
                       : q == 1 ? _mm256_set_pd(1, -1, 1, -1)
                       : q == 2 ? _mm256_set_pd(-1, -1, -1, -1)
                                : _mm256_set_pd(-1, 1, -1, 1);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d f = _mm256_set_pd(factor[k + 1], factor[k + 1], factor[k], factor[k]);
    __m256d v = _mm256_mul_pd(_mm256_loadu_pd(data + 2 * k), f);
    if (q & 1) v = _mm256_permute_pd(v, 0b0101);
    _mm256_storeu_pd(data + 2 * k, _mm256_mul_pd(v, sign));
  }
  if (k < n) scalar::spectral_scale(c.subspan(k), factor.subspan(k), q);
}

#else

bool available() noexcept { return false; }
void add_scaled(std::span<double> y, double a, std::span<const double> x) {
  scalar::add_scaled(y, a, x);
}
void lincomb(std::span<double> out, std::span<const double> x, double a, std::span<const double> y) {
  scalar::lincomb(out, x, a, y);
}
void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  scalar::multiply(out, a, b);
}
double sum(std::span<const double> x) { return scalar::sum(x); }
void spectral_scale(std::span<cplx> c, std::span<const double> factor, int quarter_turns) {
  scalar::spectral_scale(c, factor, quarter_turns);
}

#endif

}  // namespace geomflow::kernels::avx2
