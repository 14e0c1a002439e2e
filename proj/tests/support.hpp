#pragma once

// Shared helpers for the unit, property and acceptance tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "raddist/calibration.hpp"
#include "raddist/distortion.hpp"
#include "raddist/io.hpp"
#include "raddist/reference_sets.hpp"

namespace raddist::test {

/// Roots of a0 + a1 x + ... + an x^n via the eigenvalues of its companion
/// matrix; an independent oracle for the closed-form solvers.
inline std::vector<std::complex<double>> companion_roots(const std::vector<double>& ascending) {
  std::size_t n = ascending.size() - 1;
  while (n > 0 && ascending[n] == 0.0) --n;
  std::vector<std::complex<double>> roots;
  if (n == 0) return roots;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -ascending[i] / ascending[n];
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) roots.push_back(es.eigenvalues()(i));
  return roots;
}

/// Whether x f(x) is strictly increasing with f > 0 on [0, r_max], sampled
/// densely; the forward map is then invertible on that disk.
inline bool monotone_on(const DistortionModel& model, double r_max, int steps = 400) {
  double prev = 0.0;
  for (int i = 1; i <= steps; ++i) {
    const double r = r_max * i / steps;
    double f = 0.0;
    try {
      f = eval_profile(model, r);
    } catch (const Error&) {
      return false;
    }
    if (!(f > 0.0)) return false;
    const double rd = r * f;
    if (!(rd > prev)) return false;
    prev = rd;
  }
  return true;
}

/// Coefficients drawn around the published fits: one published set scaled
/// elementwise by factors in [0, 2], redrawn until the profile is positive
/// and monotone on [0, r_max].
inline DistortionModel draw_model(int model_id, std::mt19937_64& rng, double r_max = 0.5) {
  const auto sets = reference_coefficients(model_id);
  std::uniform_int_distribution<std::size_t> pick(0, sets.size() - 1);
  std::uniform_real_distribution<double> scale(0.0, 2.0);
  for (;;) {
    std::vector<double> k = sets[pick(rng)];
    for (double& v : k) v *= scale(rng);
    DistortionModel m(model_id, k);
    if (monotone_on(m, r_max)) return m;
  }
}

/// Uniform point in the disk of radius r_max.
inline NormalizedPoint draw_point(std::mt19937_64& rng, double r_max) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = r_max * std::sqrt(unit(rng));
  const double t = 2.0 * 3.14159265358979323846 * unit(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

/// Noise-free capture with intrinsics styled on the Microsoft collection:
/// 3 views of an 8x8 grid (n = 64) distorted with `model`.
inline SynthSpec recovery_spec(const DistortionModel& model) {
  SynthSpec spec = default_synth_spec(3);
  spec.intrinsics = IntrinsicParams(830.0, 830.0, 0.2, 304.0, 207.0);
  spec.model = model;
  return spec;
}

/// Significant-distortion capture styled on the ODIS collection: model-0
/// ground truth k = (-0.35, 0.16), 5 close views of an 8x8 grid, pixel noise
/// sigma = 0.2, seed 7.
inline SynthSpec ranking_spec() {
  SynthSpec spec;
  spec.intrinsics = IntrinsicParams(260.0, 255.0, -0.27, 140.0, 113.0);
  spec.model_points = grid_points(8, 8, 0.03);
  spec.views = default_views(5, 0.25);
  spec.model = DistortionModel(0, {-0.35, 0.16});
  spec.sigma = 0.2;
  spec.seed = 7;
  return spec;
}

inline double relative_error(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace raddist::test
