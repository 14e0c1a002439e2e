#include <string>

#include "raddist/calibration.hpp"
#include "raddist/kernels.hpp"
#include "residuals.hpp"

namespace raddist {
namespace detail {

ResidualFailure evaluate_residuals(const IntrinsicParams& a, std::span<const Extrinsics> extrinsics,
                                   const DistortionModel& model, const CalibrationDataset& data,
                                   std::span<double> out, ResidualWorkspace& ws) {
  const std::size_t n = data.point_count();
  ws.x.resize(n);
  ws.y.resize(n);
  ws.u.resize(n);
  ws.v.resize(n);
  const auto profile = kernels::ProfileParams::from(model);
  const auto map = kernels::PixelMap::from(a);

  for (std::size_t i = 0; i < extrinsics.size(); ++i) {
    const Eigen::Matrix3d r = extrinsics[i].rotation_matrix();
    const Eigen::Vector3d& t = extrinsics[i].translation;
    for (std::size_t j = 0; j < n; ++j) {
      const PlanePoint& m = data.model_points[j];
      const Eigen::Vector3d pc = r * Eigen::Vector3d(m.x, m.y, 0.0) + t;
      if (!(pc.z() > kDepthEpsilon)) return {ResidualStatus::NonPositiveDepth, i, j};
      ws.x[j] = pc.x() / pc.z();
      ws.y[j] = pc.y() / pc.z();
    }
    const std::size_t bad = kernels::distort_to_pixels(profile, map, {ws.x, ws.y}, {ws.u, ws.v});
    if (bad != kernels::kAllValid) return {ResidualStatus::SingularProfile, i, bad};

    const auto& obs = data.observations[i];
    double* dst = out.data() + 2 * i * n;
    for (std::size_t j = 0; j < n; ++j) {
      dst[2 * j] = obs[j].u - ws.u[j];
      dst[2 * j + 1] = obs[j].v - ws.v[j];
    }
  }
  return {};
}

double sum_of_squares(std::span<const double> residuals) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < residuals.size(); k += 2) {
    acc += residuals[k] * residuals[k] + residuals[k + 1] * residuals[k + 1];
  }
  return acc;
}

}  // namespace detail

double compute_objective(const IntrinsicParams& a, std::span<const Extrinsics> extrinsics,
                         const DistortionModel& model, const CalibrationDataset& data) {
  if (extrinsics.size() != data.view_count()) {
    throw Error(ErrorKind::CountMismatch, "expected " + std::to_string(data.view_count()) + " extrinsics, got " +
                                              std::to_string(extrinsics.size()));
  }
  for (std::size_t i = 0; i < data.view_count(); ++i) {
    if (data.observations[i].size() != data.point_count()) {
      throw Error(ErrorKind::CountMismatch, "view " + std::to_string(i + 1) + " is not aligned with the model points");
    }
  }
  std::vector<double> residuals(2 * data.view_count() * data.point_count());
  detail::ResidualWorkspace ws;
  const auto failure = detail::evaluate_residuals(a, extrinsics, model, data, residuals, ws);
  const std::string where =
      " at view " + std::to_string(failure.view + 1) + ", point " + std::to_string(failure.point + 1);
  switch (failure.status) {
    case detail::ResidualStatus::NonPositiveDepth:
      throw Error(ErrorKind::NonPositiveDepth, "model point is not in front of the camera" + where);
    case detail::ResidualStatus::SingularProfile:
      throw Error(ErrorKind::SingularProfile, "distortion profile is singular" + where);
    case detail::ResidualStatus::Ok:
      break;
  }
  return detail::sum_of_squares(residuals);
}

}  // namespace raddist
