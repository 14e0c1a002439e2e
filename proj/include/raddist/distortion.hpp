#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "raddist/core.hpp"

namespace raddist {

inline constexpr int kModelCount = 10;

/// Rational denominators whose magnitude falls below this are singular.
inline constexpr double kSingularDenominator = 1e-12;

/// Number of distortion coefficients for each of the ten radial profiles:
///
///   id  f(r)
///   0   1 + k1 r^2 + k2 r^4
///   1   1 + k r
///   2   1 + k r^2
///   3   1 + k1 r + k2 r^2
///   4   1 / (1 + k r)
///   5   1 / (1 + k r^2)
///   6   (1 + k1 r) / (1 + k2 r^2)
///   7   1 / (1 + k1 r + k2 r^2)
///   8   (1 + k1 r) / (1 + k2 r + k3 r^2)
///   9   (1 + k1 r^2) / (1 + k2 r + k3 r^2)
///
/// Throws UnknownModel outside 0..9.
std::size_t coefficient_arity(int model_id);

/// A radial profile and its coefficient vector, stored in the order the
/// coefficients appear in the formulas above.
class DistortionModel {
 public:
  /// All-zero coefficients, i.e. the identity profile.
  explicit DistortionModel(int model_id);
  DistortionModel(int model_id, std::span<const double> coefficients);
  DistortionModel(int model_id, std::initializer_list<double> coefficients);

  int id() const noexcept { return id_; }
  std::size_t arity() const noexcept { return arity_; }
  std::span<const double> coefficients() const noexcept { return {k_.data(), arity_}; }
  double k(std::size_t i) const noexcept { return i < arity_ ? k_[i] : 0.0; }

  DistortionModel with_coefficients(std::span<const double> coefficients) const;

  friend bool operator==(const DistortionModel&, const DistortionModel&) = default;

 private:
  int id_;
  std::size_t arity_;
  std::array<double, 3> k_{};
};

/// Per-ray quantities for a point whose distorted and undistorted positions
/// share the slope c = y/x.
struct RadialAuxiliaries {
  double c = 0.0;      // slope y/x
  double s = 1.0;      // sqrt(1 + c^2)
  double t = 1.0;      // 1 + c^2
  double sigma = 0.0;  // sign of x, with sgn(0) = 0

  static RadialAuxiliaries from_slope(double c, double x);
};

/// sgn with sgn(0) = 0.
constexpr double signum(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// f(r) for r >= 0. Throws SingularProfile when a denominator vanishes and
/// InvalidArgument for negative or non-finite r.
double eval_profile(const DistortionModel& model, double r);

NormalizedPoint distort_normalized(const DistortionModel& model, const NormalizedPoint& p);

/// Distortion in pixel space through the normalized frame:
/// denormalize(A, distort_normalized(model, normalize(A, p))).
PixelPoint distort_pixel(const IntrinsicParams& a, const DistortionModel& model, const PixelPoint& p);

/// Distorted abscissa along a fixed ray y = c x, written directly in terms of
/// x (the single-variable form x_d = x * g(x) obtained by substituting
/// r = sqrt(1 + c^2) |x|).
double distort_along_ray(const DistortionModel& model, double x, double c);

}  // namespace raddist
