#include <cstdlib>
#include <string_view>

#include "geomflow/kernels.hpp"

namespace geomflow::kernels {

const Backend& scalar_backend() noexcept {
  static const Backend b{"scalar", scalar::add_scaled, scalar::lincomb, scalar::multiply,
                         scalar::sum, scalar::spectral_scale};
  return b;
}

const Backend& avx2_backend() noexcept {
  static const Backend b{"avx2", avx2::add_scaled, avx2::lincomb, avx2::multiply, avx2::sum,
                         avx2::spectral_scale};
  return b;
}

namespace {

const Backend& select() noexcept {
  const char* forced = std::getenv("GEOMFLOW_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_backend();
  if (avx2::available()) return avx2_backend();
  return scalar_backend();
}

}  // namespace

const Backend& active() noexcept {
  static const Backend& chosen = select();
  return chosen;
}

}  // namespace geomflow::kernels
