#include <cstdlib>
#include <cstring>

#include "raddist/kernels.hpp"

namespace raddist::kernels {

std::string_view to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool avx2_available() noexcept {
#if defined(RADDIST_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool available = __builtin_cpu_supports("avx2");
  return available;
#else
  return false;
#endif
}

Backend active_backend() noexcept {
  static const Backend backend = [] {
    const char* force = std::getenv("RADDIST_FORCE_SCALAR");
    if (force != nullptr && std::strcmp(force, "0") != 0 && force[0] != '\0') return Backend::Scalar;
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
  }();
  return backend;
}

std::size_t distort(const ProfileParams& profile, PointsView in, PointsOut out) noexcept {
#if defined(RADDIST_WITH_AVX2)
  if (active_backend() == Backend::Avx2) return avx2::distort(profile, in, out);
#endif
  return scalar::distort(profile, in, out);
}

std::size_t distort_to_pixels(const ProfileParams& profile, const PixelMap& map, PointsView in, PointsOut out) noexcept {
#if defined(RADDIST_WITH_AVX2)
  if (active_backend() == Backend::Avx2) return avx2::distort_to_pixels(profile, map, in, out);
#endif
  return scalar::distort_to_pixels(profile, map, in, out);
}

}  // namespace raddist::kernels
