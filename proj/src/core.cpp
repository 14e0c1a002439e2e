#include "raddist/core.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

namespace raddist {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorKind::SingularProfile: return "SingularProfile";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::UnsupportedModel: return "UnsupportedModel";
    case ErrorKind::NoRealCandidate: return "NoRealCandidate";
    case ErrorKind::BracketNotFound: return "BracketNotFound";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::SingularConfiguration: return "SingularConfiguration";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

IntrinsicParams::IntrinsicParams(double alpha, double beta, double gamma, double u0, double v0)
    : alpha_(alpha), beta_(beta), gamma_(gamma), u0_(u0), v0_(v0) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidArgument, "focal scales must be positive and finite (alpha=" +
                                                std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
  }
  if (!std::isfinite(gamma) || !std::isfinite(u0) || !std::isfinite(v0)) {
    throw Error(ErrorKind::InvalidArgument, "intrinsic parameters must be finite");
  }
}

Eigen::Matrix3d IntrinsicParams::matrix() const {
  Eigen::Matrix3d a;
  a << alpha_, gamma_, u0_, 0.0, beta_, v0_, 0.0, 0.0, 1.0;
  return a;
}

Eigen::Matrix3d IntrinsicParams::inverse() const {
  // Closed-form inverse of the upper-triangular matrix.
  Eigen::Matrix3d inv;
  inv << 1.0 / alpha_, -gamma_ / (alpha_ * beta_), (gamma_ * v0_ - beta_ * u0_) / (alpha_ * beta_),  //
      0.0, 1.0 / beta_, -v0_ / beta_,                                                               //
      0.0, 0.0, 1.0;
  return inv;
}

Eigen::Matrix3d rotation_to_matrix(const Eigen::Vector3d& rotation) {
  const double theta2 = rotation.squaredNorm();
  Eigen::Matrix3d k;
  k << 0.0, -rotation.z(), rotation.y(),  //
      rotation.z(), 0.0, -rotation.x(),   //
      -rotation.y(), rotation.x(), 0.0;

  // R = I + a K + b K^2 with a = sin(t)/t, b = (1 - cos(t))/t^2.
  double a = 0.0;
  double b = 0.0;
  if (theta2 < 1e-10) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Eigen::Matrix3d::Identity() + a * k + b * (k * k);
}

Eigen::Vector3d matrix_to_rotation(const Eigen::Matrix3d& rotation) {
  const Eigen::AngleAxisd aa(rotation);
  return aa.axis() * aa.angle();
}

Eigen::Matrix3d Extrinsics::rotation_matrix() const { return rotation_to_matrix(rotation); }

CameraPoint Extrinsics::to_camera(const WorldPoint& p) const {
  const Eigen::Vector3d pc = rotation_matrix() * Eigen::Vector3d(p.x, p.y, p.z) + translation;
  return {pc.x(), pc.y(), pc.z()};
}

NormalizedPoint camera_ratio(const CameraPoint& p) {
  if (!(p.z > kDepthEpsilon)) {
    throw Error(ErrorKind::NonPositiveDepth, "camera-frame depth " + std::to_string(p.z) + " is not positive");
  }
  return {p.x / p.z, p.y / p.z};
}

NormalizedPoint camera_ratio(const Extrinsics& ext, const WorldPoint& p) { return camera_ratio(ext.to_camera(p)); }

PixelPoint project_ideal(const IntrinsicParams& a, const Extrinsics& ext, const WorldPoint& p) {
  // Homogeneous form: lambda [u v 1]^T = A [R|t] [P;1].
  const Eigen::Vector3d pc = ext.rotation_matrix() * Eigen::Vector3d(p.x, p.y, p.z) + ext.translation;
  if (!(pc.z() > kDepthEpsilon)) {
    throw Error(ErrorKind::NonPositiveDepth, "camera-frame depth " + std::to_string(pc.z()) + " is not positive");
  }
  const Eigen::Vector3d h = a.matrix() * pc;
  return {h.x() / h.z(), h.y() / h.z()};
}

NormalizedPoint normalize(const IntrinsicParams& a, const PixelPoint& p) noexcept {
  const double y = (p.v - a.v0()) / a.beta();
  const double x = (p.u - a.u0() - a.gamma() * y) / a.alpha();
  return {x, y};
}

PixelPoint denormalize(const IntrinsicParams& a, const NormalizedPoint& n) noexcept {
  return {a.alpha() * n.x + a.gamma() * n.y + a.u0(), a.beta() * n.y + a.v0()};
}

}  // namespace raddist
