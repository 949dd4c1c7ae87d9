#include "geomflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "geomflow/error.hpp"
#include "geomflow/kernels.hpp"

namespace geomflow {

namespace {

struct Plans {
  fftw_plan r2c;
  fftw_plan c2r;
  fftw_plan c2c_forward;
  fftw_plan c2c_backward;
};

// FFTW's planner is not reentrant; execution with the new-array interface is.
const Plans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, Plans> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const int ni = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  double* real = fftw_alloc_real(n);
  fftw_complex* half = fftw_alloc_complex(n / 2 + 1);
  fftw_complex* a = fftw_alloc_complex(n);
  fftw_complex* b = fftw_alloc_complex(n);
  Plans p{fftw_plan_dft_r2c_1d(ni, real, half, flags), fftw_plan_dft_c2r_1d(ni, half, real, flags),
          fftw_plan_dft_1d(ni, a, b, FFTW_FORWARD, flags),
          fftw_plan_dft_1d(ni, a, b, FFTW_BACKWARD, flags)};
  fftw_free(real);
  fftw_free(half);
  fftw_free(a);
  fftw_free(b);
  return cache.emplace(n, p).first->second;
}

void forward(const GridFunction& f, std::vector<cplx>& out) {
  const auto& p = plans_for(f.size());
  out.resize(f.size() / 2 + 1);
  std::vector<double> in = f.values;
  fftw_execute_dft_r2c(p.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
}

GridFunction backward(const PeriodicGrid& g, std::vector<cplx> coeffs) {
  const auto& p = plans_for(g.n());
  std::vector<double> out(g.n());
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(coeffs.data()), out.data());
  return {g, std::move(out)};
}

void check_finite(const GridFunction& f, const char* where) {
  if (!f.all_finite()) throw Error(ErrorKind::InvalidInput, std::string(where) + ": non-finite sample");
}

void check_order(int order) {
  if (order < 0 || order > kMaxDerivativeOrder)
    throw Error(ErrorKind::UnsupportedOrder, "derivative order outside 0..5", order);
}

// Real factors k^order / n for the half spectrum; the i^order rotation is applied
// by the kernel. The Nyquist mode is dropped for odd orders.
std::vector<double> symbol_factors(const PeriodicGrid& g, std::size_t count, int order) {
  const std::size_t n = g.n();
  std::vector<double> factor(count);
  for (std::size_t k = 0; k < count; ++k) {
    double kk = static_cast<double>(k);
    const bool nyquist = (n % 2 == 0) && k == n / 2;
    factor[k] = (nyquist && order % 2 == 1) ? 0.0
                                            : std::pow(g.wavenumber(kk), order) / static_cast<double>(n);
  }
  return factor;
}

}  // namespace

std::vector<cplx> fourier_coefficients(const GridFunction& f) {
  std::vector<cplx> c;
  forward(f, c);
  for (auto& v : c) v /= static_cast<double>(f.size());
  return c;
}

GridFunction from_fourier_coefficients(const PeriodicGrid& g, const std::vector<cplx>& coeffs) {
  if (coeffs.size() != g.n() / 2 + 1)
    throw Error(ErrorKind::ShapeMismatch, "coefficient count does not match grid", double(coeffs.size()));
  return backward(g, coeffs);
}

GridFunction derivative(const GridFunction& f, int order) {
  check_order(order);
  check_finite(f, "derivative");
  if (order == 0) return f;
  std::vector<cplx> c;
  forward(f, c);
  kernels::spectral_scale(c, symbol_factors(f.grid, c.size(), order), order);
  return backward(f.grid, std::move(c));
}

std::vector<GridFunction> jet(const GridFunction& f, int max_order) {
  check_order(max_order);
  check_finite(f, "jet");
  std::vector<GridFunction> out;
  out.reserve(max_order + 1);
  out.push_back(f);
  std::vector<cplx> c;
  forward(f, c);
  for (int order = 1; order <= max_order; ++order) {
    std::vector<cplx> d = c;
    kernels::spectral_scale(d, symbol_factors(f.grid, d.size(), order), order);
    out.push_back(backward(f.grid, std::move(d)));
  }
  return out;
}

ComplexGridFunction derivative(const ComplexGridFunction& f, int order) {
  check_order(order);
  if (order == 0) return f;
  const std::size_t n = f.size();
  const auto& p = plans_for(n);
  std::vector<cplx> in = f.values;
  std::vector<cplx> c(n);
  fftw_execute_dft(p.c2c_forward, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(c.data()));
  std::vector<double> factor(n);
  for (std::size_t k = 0; k < n; ++k) {
    const bool nyquist = (n % 2 == 0) && k == n / 2;
    const double signed_k = k <= n / 2 ? double(k) : double(k) - double(n);
    factor[k] = (nyquist && order % 2 == 1)
                    ? 0.0
                    : std::pow(f.grid.wavenumber(signed_k), order) / static_cast<double>(n);
  }
  kernels::spectral_scale(c, factor, order);
  std::vector<cplx> out(n);
  fftw_execute_dft(p.c2c_backward, reinterpret_cast<fftw_complex*>(c.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return {f.grid, std::move(out)};
}

double integrate(const GridFunction& f) {
  check_finite(f, "integrate");
  return f.grid.dx() * kernels::sum(f.values);
}

cplx integrate(const ComplexGridFunction& f) {
  cplx s{};
  for (const auto& v : f.values) s += v;
  return s * f.grid.dx();
}

double inner(const GridFunction& a, const GridFunction& b) { return integrate(a * b); }
double l2_norm(const GridFunction& f) { return std::sqrt(inner(f, f)); }

Antiderivative antiderivative(const GridFunction& f, double base_value, MeanHandling mean) {
  check_finite(f, "antiderivative");
  const auto& g = f.grid;
  const std::size_t n = g.n();
  std::vector<cplx> c;
  forward(f, c);
  const double slope = c[0].real() / static_cast<double>(n);
  c[0] = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) {
    const bool nyquist = (n % 2 == 0) && k == n / 2;
    // 1/(ik) = -i/k
    c[k] = nyquist ? cplx{} : c[k] * cplx{0.0, -1.0 / g.wavenumber(double(k))} / double(n);
  }
  GridFunction periodic = backward(g, std::move(c));
  const double shift = base_value - periodic[0];
  const double used_slope = mean == MeanHandling::KeepLinearPart ? slope : 0.0;
  for (std::size_t j = 0; j < n; ++j) periodic[j] += shift + used_slope * g.point(j);
  return {std::move(periodic), used_slope};
}

std::vector<double> evaluate_at(const GridFunction& f, std::span<const double> xs) {
  const auto c = fourier_coefficients(f);
  const std::size_t n = f.size();
  const double two_pi_over_l = 2.0 * std::numbers::pi / f.grid.length();
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double theta = two_pi_over_l * xs[i];
    double s = c[0].real();
    // Recurrence for e^{ik theta}.
    const cplx step = std::polar(1.0, theta);
    cplx e = step;
    for (std::size_t k = 1; k < c.size(); ++k, e *= step) {
      const bool nyquist = (n % 2 == 0) && k == n / 2;
      if (nyquist)
        s += c[k].real() * std::cos(double(k) * theta);
      else
        s += 2.0 * (c[k] * e).real();
    }
    out[i] = s;
  }
  return out;
}

GridFunction dealias(const GridFunction& f) {
  std::vector<cplx> c;
  forward(f, c);
  const std::size_t n = f.size();
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (3 * k > n) c[k] = 0.0;
    else c[k] /= static_cast<double>(n);
  }
  return backward(f.grid, std::move(c));
}

GridFunction band_limit(const GridFunction& f, double fraction) {
  if (fraction >= 1.0) return f;
  std::vector<cplx> c;
  forward(f, c);
  const double cutoff = fraction * double(f.size() / 2);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = double(k) > cutoff ? cplx{} : c[k] / double(f.size());
  return backward(f.grid, std::move(c));
}

}  // namespace geomflow
