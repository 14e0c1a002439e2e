#pragma once

// Batch forward-distortion kernels over structure-of-arrays point sets.
//
// Every kernel has a scalar reference and, where the target supports it, an
// AVX2 variant. Both perform the same IEEE operations in the same order (the
// AVX2 unit is built without FMA), so their outputs are bit-identical. The
// unqualified entry points dispatch at runtime to the best available variant.

#include <cstddef>
#include <span>
#include <string_view>

#include "raddist/core.hpp"
#include "raddist/distortion.hpp"

namespace raddist::kernels {

inline constexpr std::size_t kAllValid = static_cast<std::size_t>(-1);

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend backend) noexcept;

/// Coefficients flattened for the kernels; unused entries are zero.
struct ProfileParams {
  int model_id = 0;
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;

  static ProfileParams from(const DistortionModel& model) noexcept {
    return {model.id(), model.k(0), model.k(1), model.k(2)};
  }
};

struct PixelMap {
  double alpha = 1.0;
  double gamma = 0.0;
  double u0 = 0.0;
  double beta = 1.0;
  double v0 = 0.0;

  static PixelMap from(const IntrinsicParams& a) noexcept { return {a.alpha(), a.gamma(), a.u0(), a.beta(), a.v0()}; }
};

/// Read-only normalized coordinates.
struct PointsView {
  std::span<const double> x;
  std::span<const double> y;
};

/// Writable output coordinates, same length as the input.
struct PointsOut {
  std::span<double> x;
  std::span<double> y;
};

/// Whether the running CPU can execute the AVX2 variants.
bool avx2_available() noexcept;

/// Backend used by the dispatching entry points. Honors the environment
/// variable RADDIST_FORCE_SCALAR=1.
Backend active_backend() noexcept;

// The kernels return kAllValid on success, or the index of the first point
// whose profile denominator is singular (outputs past that point are
// unspecified). Lengths of all spans must match.

/// (x, y) -> (x f(r), y f(r)).
std::size_t distort(const ProfileParams& profile, PointsView in, PointsOut out) noexcept;

/// (x, y) -> A * distort(x, y), i.e. distorted pixel coordinates.
std::size_t distort_to_pixels(const ProfileParams& profile, const PixelMap& map, PointsView in, PointsOut out) noexcept;

namespace scalar {
std::size_t distort(const ProfileParams& profile, PointsView in, PointsOut out) noexcept;
std::size_t distort_to_pixels(const ProfileParams& profile, const PixelMap& map, PointsView in, PointsOut out) noexcept;
}  // namespace scalar

#if defined(RADDIST_WITH_AVX2)
namespace avx2 {
std::size_t distort(const ProfileParams& profile, PointsView in, PointsOut out) noexcept;
std::size_t distort_to_pixels(const ProfileParams& profile, const PixelMap& map, PointsView in, PointsOut out) noexcept;
}  // namespace avx2
#endif

}  // namespace raddist::kernels
