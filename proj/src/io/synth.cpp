#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "raddist/io.hpp"

namespace raddist {

std::vector<PlanePoint> grid_points(int cols, int rows, double pitch) {
  if (cols < 1 || rows < 1 || !(pitch > 0.0) || !std::isfinite(pitch)) {
    throw Error(ErrorKind::InvalidArgument, "grid needs positive dimensions and pitch");
  }
  std::vector<PlanePoint> points;
  points.reserve(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows));
  const double cx = 0.5 * (cols - 1) * pitch;
  const double cy = 0.5 * (rows - 1) * pitch;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) points.push_back({c * pitch - cx, r * pitch - cy});
  }
  return points;
}

std::vector<Extrinsics> default_views(std::size_t count, double distance, double tilt) {
  if (!(distance > 0.0) || !std::isfinite(distance) || !std::isfinite(tilt)) {
    throw Error(ErrorKind::InvalidArgument, "view distance must be positive and finite");
  }
  std::vector<Extrinsics> views;
  views.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Tilt axes spread evenly over a half turn, plus a small in-plane roll
    // and depth jitter so no two views are alike.
    const double phi = std::numbers::pi / 4.0 + std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
    Extrinsics e;
    e.rotation = Eigen::Vector3d(tilt * std::cos(phi), tilt * std::sin(phi), 0.1 * std::sin(1.0 + 2.0 * i));
    e.translation = Eigen::Vector3d(0.0, 0.0, distance * (1.0 + 0.08 * std::cos(0.7 + 1.3 * i)));
    views.push_back(e);
  }
  return views;
}

SynthSpec default_synth_spec(std::size_t views) {
  SynthSpec spec;
  spec.model_points = grid_points(8, 8, 0.03);
  spec.views = default_views(views, 0.55);
  return spec;
}

CalibrationDataset generate_synthetic(const SynthSpec& spec) {
  if (spec.views.empty()) throw Error(ErrorKind::InvalidArgument, "synthetic capture needs at least one view");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw Error(ErrorKind::InvalidArgument, "noise sigma must be finite and non-negative");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  CalibrationDataset data;
  data.model_points = spec.model_points;
  for (std::size_t i = 0; i < spec.views.size(); ++i) {
    std::vector<PixelPoint> obs;
    obs.reserve(spec.model_points.size());
    for (std::size_t j = 0; j < spec.model_points.size(); ++j) {
      const PlanePoint& m = spec.model_points[j];
      const CameraPoint pc = spec.views[i].to_camera(WorldPoint{m.x, m.y, 0.0});
      if (!(pc.z > 0.0)) {
        throw Error(ErrorKind::NonPositiveDepth, "view " + std::to_string(i + 1) + " puts point " +
                                                     std::to_string(j + 1) + " behind the camera");
      }
      PixelPoint p = distort_pixel(spec.intrinsics, spec.model, project_ideal(spec.intrinsics, spec.views[i], {m.x, m.y, 0.0}));
      if (spec.sigma > 0.0) {
        p.u += spec.sigma * noise(rng);
        p.v += spec.sigma * noise(rng);
      }
      obs.push_back(p);
    }
    data.observations.push_back(std::move(obs));
  }
  return data;
}

std::string format_ground_truth(const SynthSpec& spec) {
  std::string out = "# alpha gamma u0 beta v0\n";
  out += format_intrinsics(spec.intrinsics);
  out += "# model k...\n" + std::to_string(spec.model.id());
  for (double k : spec.model.coefficients()) out += ' ' + format_double(k);
  out += "\n# sigma seed\n" + format_double(spec.sigma) + ' ' + std::to_string(spec.seed) + '\n';
  out += "# per view: rx ry rz tx ty tz (axis-angle rotation, translation)\n";
  for (const Extrinsics& e : spec.views) {
    for (int c = 0; c < 3; ++c) out += format_double(e.rotation(c)) + ' ';
    out += format_double(e.translation(0)) + ' ' + format_double(e.translation(1)) + ' ' +
           format_double(e.translation(2)) + '\n';
  }
  return out;
}

}  // namespace raddist
