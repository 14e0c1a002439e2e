#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "raddist/calibration.hpp"

namespace raddist {
namespace {

// Second-smallest over largest singular value of the stacked conic
// constraints; below this the conic is not determined.
constexpr double kConicRankRatio = 1e-10;

// Constraint row v_ij for b = (B11, B12, B22, B13, B23, B33).
Eigen::Matrix<double, 1, 6> conic_row(const Eigen::Matrix3d& h, int i, int j) {
  Eigen::Matrix<double, 1, 6> v;
  v << h(0, i) * h(0, j), h(0, i) * h(1, j) + h(1, i) * h(0, j), h(1, i) * h(1, j),
      h(2, i) * h(0, j) + h(0, i) * h(2, j), h(2, i) * h(1, j) + h(1, i) * h(2, j), h(2, i) * h(2, j);
  return v;
}

// Scale that brings pixel coordinates to O(1): the largest coordinate of the
// plane origin's image over all views.
double pixel_scale(std::span<const Homography> homographies) {
  double w = 1.0;
  for (const Homography& h : homographies) {
    const Eigen::Matrix3d& m = h.matrix();
    if (m(2, 2) != 0.0) w = std::max({w, std::abs(m(0, 2) / m(2, 2)), std::abs(m(1, 2) / m(2, 2))});
  }
  return w;
}

}  // namespace

Eigen::Matrix3d estimate_absolute_conic(std::span<const Homography> homographies) {
  if (homographies.size() < 3) {
    throw Error(ErrorKind::InsufficientData, "the absolute conic needs at least 3 homographies");
  }
  // Precondition with T = diag(1/w, 1/w, 1) applied on the image side.
  const double w = pixel_scale(homographies);
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = t(1, 1) = 1.0 / w;

  Eigen::MatrixXd v(2 * static_cast<Eigen::Index>(homographies.size()), 6);
  for (std::size_t i = 0; i < homographies.size(); ++i) {
    Eigen::Matrix3d h = t * homographies[i].matrix();
    h /= h.norm();
    const auto r = static_cast<Eigen::Index>(2 * i);
    v.row(r) = conic_row(h, 0, 1);
    v.row(r + 1) = conic_row(h, 0, 0) - conic_row(h, 1, 1);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  if (!(sv(4) > kConicRankRatio * sv(0))) {
    throw Error(ErrorKind::SingularConfiguration,
                "conic constraints are rank deficient (are the calibration planes parallel?)");
  }
  const Eigen::VectorXd b = svd.matrixV().col(5);
  Eigen::Matrix3d bn;
  bn << b(0), b(1), b(3), b(1), b(2), b(4), b(3), b(4), b(5);

  // Back to pixel coordinates: B = T^T B' T.
  Eigen::Matrix3d bp = t.transpose() * bn * t;
  bp /= bp.norm();
  if (bp(0, 0) < 0.0) bp = -bp;
  return bp;
}

IntrinsicParams intrinsics_from_conic(const Eigen::Matrix3d& b) {
  const double b11 = b(0, 0);
  const double b12 = b(0, 1);
  const double b22 = b(1, 1);
  const double b13 = b(0, 2);
  const double b23 = b(1, 2);
  const double b33 = b(2, 2);
  const double den = b11 * b22 - b12 * b12;
  if (!(std::abs(b11) > 0.0) || !(std::abs(den) > 0.0)) {
    throw Error(ErrorKind::SingularConfiguration, "absolute conic is degenerate");
  }
  const double v0 = (b12 * b13 - b11 * b23) / den;
  const double lambda = b33 - (b13 * b13 + v0 * (b12 * b13 - b11 * b23)) / b11;
  const double alpha2 = lambda / b11;
  const double beta2 = lambda * b11 / den;
  if (!(alpha2 > 0.0) || !(beta2 > 0.0)) {
    throw Error(ErrorKind::SingularConfiguration, "absolute conic is not positive definite");
  }
  const double alpha = std::sqrt(alpha2);
  const double beta = std::sqrt(beta2);
  const double gamma = -b12 * alpha2 * beta / lambda;
  const double u0 = gamma * v0 / beta - b13 * alpha2 / lambda;
  return IntrinsicParams(alpha, beta, gamma, u0, v0);
}

IntrinsicParams estimate_intrinsics_linear(std::span<const Homography> homographies) {
  return intrinsics_from_conic(estimate_absolute_conic(homographies));
}

Extrinsics estimate_extrinsics(const IntrinsicParams& a, const Homography& h, PlanePoint plane_centroid) {
  const Eigen::Matrix3d m = a.inverse() * h.matrix();
  const double n1 = m.col(0).norm();
  const double n2 = m.col(1).norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) {
    throw Error(ErrorKind::DegenerateConfiguration, "homography does not describe a plane pose");
  }
  double lambda = 2.0 / (n1 + n2);
  const double depth = (m * Eigen::Vector3d(plane_centroid.x, plane_centroid.y, 1.0)).z() * lambda;
  if (depth == 0.0 || !std::isfinite(depth)) {
    throw Error(ErrorKind::BehindCamera, "calibration plane passes through the camera center");
  }
  if (depth < 0.0) lambda = -lambda;

  const Eigen::Vector3d r1 = lambda * m.col(0);
  const Eigen::Vector3d r2 = lambda * m.col(1);
  Eigen::Matrix3d q;
  q << r1, r2, r1.cross(r2);
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d r = u * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    u.col(2) = -u.col(2);
    r = u * svd.matrixV().transpose();
  }
  Extrinsics ext;
  ext.rotation = matrix_to_rotation(r);
  ext.translation = lambda * m.col(2);
  return ext;
}

LinearInitialization initialize_linear(const CalibrationDataset& data) {
  validate_dataset(data);
  std::vector<Homography> hs;
  hs.reserve(data.view_count());
  for (const auto& obs : data.observations) hs.push_back(estimate_homography(data.model_points, obs));
  const IntrinsicParams a = estimate_intrinsics_linear(hs);

  PlanePoint centroid;
  for (const PlanePoint& p : data.model_points) {
    centroid.x += p.x;
    centroid.y += p.y;
  }
  centroid.x /= static_cast<double>(data.point_count());
  centroid.y /= static_cast<double>(data.point_count());

  std::vector<Extrinsics> exts;
  exts.reserve(hs.size());
  for (const Homography& h : hs) exts.push_back(estimate_extrinsics(a, h, centroid));
  return {a, std::move(exts), std::move(hs)};
}

std::vector<double> estimate_distortion_linear(const IntrinsicParams& a, std::span<const Extrinsics> extrinsics,
                                               int model_id, const CalibrationDataset& data) {
  const std::size_t arity = coefficient_arity(model_id);
  if (extrinsics.size() != data.view_count()) {
    throw Error(ErrorKind::CountMismatch, "one extrinsic estimate per view is required");
  }
  // Per coefficient: multiplier of the numerator (num) or denominator (den)
  // term, as a power of r.
  struct Term {
    bool numerator;
    int power;
  };
  std::array<Term, 3> terms{};
  switch (model_id) {
    case 0: terms = {{{true, 2}, {true, 4}, {}}}; break;
    case 1: terms = {{{true, 1}, {}, {}}}; break;
    case 2: terms = {{{true, 2}, {}, {}}}; break;
    case 3: terms = {{{true, 1}, {true, 2}, {}}}; break;
    case 4: terms = {{{false, 1}, {}, {}}}; break;
    case 5: terms = {{{false, 2}, {}, {}}}; break;
    case 6: terms = {{{true, 1}, {false, 2}, {}}}; break;
    case 7: terms = {{{false, 1}, {false, 2}, {}}}; break;
    case 8: terms = {{{true, 1}, {false, 1}, {false, 2}}}; break;
    default: terms = {{{true, 2}, {false, 1}, {false, 2}}}; break;
  }

  const auto rows = static_cast<Eigen::Index>(2 * data.view_count() * data.point_count());
  Eigen::MatrixXd d(rows, static_cast<Eigen::Index>(arity));
  Eigen::VectorXd rhs(rows);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < data.view_count(); ++i) {
    for (std::size_t j = 0; j < data.point_count(); ++j) {
      const PlanePoint& m = data.model_points[j];
      const NormalizedPoint n = camera_ratio(extrinsics[i], WorldPoint{m.x, m.y, 0.0});
      const double r = std::hypot(n.x, n.y);
      const PixelPoint ideal = denormalize(a, n);
      const PixelPoint& obs = data.observations[i][j];
      const double du = ideal.u - a.u0();
      const double dv = ideal.v - a.v0();
      const double dud = obs.u - a.u0();
      const double dvd = obs.v - a.v0();
      for (std::size_t c = 0; c < arity; ++c) {
        const double rp = std::pow(r, terms[c].power);
        const auto col = static_cast<Eigen::Index>(c);
        d(row, col) = terms[c].numerator ? du * rp : -dud * rp;
        d(row + 1, col) = terms[c].numerator ? dv * rp : -dvd * rp;
      }
      rhs(row) = obs.u - ideal.u;
      rhs(row + 1) = obs.v - ideal.v;
      row += 2;
    }
  }
  const Eigen::VectorXd k = d.colPivHouseholderQr().solve(rhs);
  return {k.data(), k.data() + k.size()};
}

}  // namespace raddist
