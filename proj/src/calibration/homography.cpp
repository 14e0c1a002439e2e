#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "raddist/calibration.hpp"

namespace raddist {
namespace {

constexpr double kCollinearRatio = 1e-10;

// Isotropic normalization: centroid to the origin, mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double dist = 0.0;
  for (const auto& p : pts) dist += (p - mean).norm();
  dist /= static_cast<double>(pts.size());
  if (!(dist > 0.0)) {
    throw Error(ErrorKind::DegenerateConfiguration, "all points coincide");
  }
  const double s = std::sqrt(2.0) / dist;
  Eigen::Matrix3d t;
  t << s, 0.0, -s * mean.x(), 0.0, s, -s * mean.y(), 0.0, 0.0, 1.0;
  return t;
}

// Ratio of the minor to the major principal spread; ~0 for collinear sets.
double spread_ratio(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const double major = eig.eigenvalues()(1);
  return major > 0.0 ? std::max(eig.eigenvalues()(0), 0.0) / major : 0.0;
}

void check_spread(const std::vector<Eigen::Vector2d>& pts, std::string_view what) {
  if (spread_ratio(pts) < kCollinearRatio) {
    throw Error(ErrorKind::DegenerateConfiguration, std::string(what) + " are collinear");
  }
}

}  // namespace

void validate_dataset(const CalibrationDataset& data) {
  const std::size_t n = data.point_count();
  if (n < 4) {
    throw Error(ErrorKind::InsufficientData, "need at least 4 model points, got " + std::to_string(n));
  }
  if (data.view_count() < 3) {
    throw Error(ErrorKind::InsufficientData,
                "need at least 3 views to estimate intrinsics and extrinsics, got " + std::to_string(data.view_count()));
  }
  std::vector<Eigen::Vector2d> pts;
  std::set<std::pair<double, double>> seen;
  for (std::size_t j = 0; j < n; ++j) {
    const PlanePoint& p = data.model_points[j];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::InvalidArgument, "model point " + std::to_string(j + 1) + " is not finite");
    }
    if (!seen.emplace(p.x, p.y).second) {
      throw Error(ErrorKind::DegenerateConfiguration, "model point " + std::to_string(j + 1) + " is duplicated");
    }
    pts.emplace_back(p.x, p.y);
  }
  check_spread(pts, "model points");

  for (std::size_t i = 0; i < data.view_count(); ++i) {
    const auto& obs = data.observations[i];
    const std::string view = "view " + std::to_string(i + 1);
    if (obs.size() != n) {
      throw Error(ErrorKind::CountMismatch,
                  view + ": expected " + std::to_string(n) + " points, got " + std::to_string(obs.size()));
    }
    pts.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(obs[j].u) || !std::isfinite(obs[j].v)) {
        throw Error(ErrorKind::InvalidArgument, view + ": point " + std::to_string(j + 1) + " is not finite");
      }
      pts.emplace_back(obs[j].u, obs[j].v);
    }
    check_spread(pts, view + ": image points");
    for (std::size_t k = 0; k < i; ++k) {
      if (data.observations[k] == obs) {
        throw Error(ErrorKind::DegenerateConfiguration,
                    view + " duplicates view " + std::to_string(k + 1));
      }
    }
  }
}

Homography::Homography(const Eigen::Matrix3d& h, double residual) : h_(h), residual_(residual) {
  const double norm = h_.norm();
  if (!(norm > 0.0) || !h_.allFinite()) {
    throw Error(ErrorKind::DegenerateConfiguration, "homography matrix is zero or not finite");
  }
  h_ /= norm;
  if (h_(2, 2) < 0.0) h_ = -h_;
}

PixelPoint Homography::apply(const PlanePoint& p) const noexcept {
  const Eigen::Vector3d m = h_ * Eigen::Vector3d(p.x, p.y, 1.0);
  return {m.x() / m.z(), m.y() / m.z()};
}

Homography estimate_homography(std::span<const PlanePoint> model_points, std::span<const PixelPoint> image_points) {
  const std::size_t n = model_points.size();
  if (n != image_points.size()) {
    throw Error(ErrorKind::CountMismatch, "model and image point counts differ");
  }
  if (n < 4) {
    throw Error(ErrorKind::InsufficientData, "a homography needs at least 4 point pairs");
  }
  std::vector<Eigen::Vector2d> src;
  std::vector<Eigen::Vector2d> dst;
  for (std::size_t j = 0; j < n; ++j) {
    src.emplace_back(model_points[j].x, model_points[j].y);
    dst.emplace_back(image_points[j].u, image_points[j].v);
  }
  check_spread(src, "model points");
  check_spread(dst, "image points");
  const Eigen::Matrix3d ts = normalizing_transform(src);
  const Eigen::Matrix3d td = normalizing_transform(dst);

  Eigen::MatrixXd l(2 * n, 9);
  for (std::size_t j = 0; j < n; ++j) {
    const Eigen::Vector3d m = ts * src[j].homogeneous();
    const Eigen::Vector3d d = td * dst[j].homogeneous();
    const auto r = static_cast<Eigen::Index>(2 * j);
    l.row(r) << m.x(), m.y(), 1.0, 0.0, 0.0, 0.0, -d.x() * m.x(), -d.x() * m.y(), -d.x();
    l.row(r + 1) << 0.0, 0.0, 0.0, m.x(), m.y(), 1.0, -d.y() * m.x(), -d.y() * m.y(), -d.y();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(l, Eigen::ComputeThinV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Eigen::Matrix3d hm = td.inverse() * hn * ts;

  const Eigen::JacobiSVD<Eigen::Matrix3d> check(hm);
  const auto sv = check.singularValues();
  if (!(sv(2) > 1e-12 * sv(0))) {
    throw Error(ErrorKind::DegenerateConfiguration, "estimated homography is rank deficient");
  }

  double residual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Eigen::Vector3d m = hm * src[j].homogeneous();
    residual = std::max(residual, (m.hnormalized() - dst[j]).norm());
  }
  return Homography(hm, residual);
}

}  // namespace raddist
