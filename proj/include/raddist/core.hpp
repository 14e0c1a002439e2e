#pragma once

#include <Eigen/Core>

#include "raddist/errors.hpp"

namespace raddist {

/// Depth magnitude below which a camera point is considered to lie on the
/// camera plane.
inline constexpr double kDepthEpsilon = 1e-12;

struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct CameraPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Camera-frame ratios (X/Z, Y/Z); dimensionless.
struct NormalizedPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const NormalizedPoint&, const NormalizedPoint&) = default;
};

/// Image coordinates in pixels.
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

/// The five intrinsic parameters. The induced matrix is
///
///     | alpha gamma u0 |
///     |   0   beta  v0 |
///     |   0    0     1 |
///
/// Construction rejects non-positive or non-finite focal scales.
class IntrinsicParams {
 public:
  IntrinsicParams(double alpha, double beta, double gamma, double u0, double v0);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  double u0() const noexcept { return u0_; }
  double v0() const noexcept { return v0_; }

  Eigen::Matrix3d matrix() const;
  Eigen::Matrix3d inverse() const;

  friend bool operator==(const IntrinsicParams&, const IntrinsicParams&) = default;

 private:
  double alpha_;
  double beta_;
  double gamma_;
  double u0_;
  double v0_;
};

/// World-to-camera rigid transform, P_c = R P_w + t, with R stored as an
/// axis-angle vector (unit axis scaled by the angle in radians).
struct Extrinsics {
  Eigen::Vector3d rotation = Eigen::Vector3d::Zero();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Matrix3d rotation_matrix() const;
  CameraPoint to_camera(const WorldPoint& p) const;
};

Eigen::Matrix3d rotation_to_matrix(const Eigen::Vector3d& rotation);

/// Inverse of rotation_to_matrix for a proper rotation; the returned angle lies
/// in [0, pi].
Eigen::Vector3d matrix_to_rotation(const Eigen::Matrix3d& rotation);

/// Throws NonPositiveDepth when Z <= kDepthEpsilon.
NormalizedPoint camera_ratio(const CameraPoint& p);
NormalizedPoint camera_ratio(const Extrinsics& ext, const WorldPoint& p);

PixelPoint project_ideal(const IntrinsicParams& a, const Extrinsics& ext, const WorldPoint& p);

NormalizedPoint normalize(const IntrinsicParams& a, const PixelPoint& p) noexcept;
PixelPoint denormalize(const IntrinsicParams& a, const NormalizedPoint& n) noexcept;

}  // namespace raddist
