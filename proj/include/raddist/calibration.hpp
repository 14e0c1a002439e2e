#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "raddist/core.hpp"
#include "raddist/distortion.hpp"

namespace raddist {

/// Model point on the calibration plane (Z = 0 in the world frame).
struct PlanePoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

/// n planar model points and N views of them; observations[i][j] is the
/// pixel position of model_points[j] in view i.
struct CalibrationDataset {
  std::vector<PlanePoint> model_points;
  std::vector<std::vector<PixelPoint>> observations;

  std::size_t point_count() const noexcept { return model_points.size(); }
  std::size_t view_count() const noexcept { return observations.size(); }
};

/// Rejects datasets that cannot be calibrated: fewer than 3 views, fewer
/// than 4 points, misaligned observation lists, non-finite values, collinear
/// or duplicated points, and duplicated views. Messages name the offending
/// view or point.
void validate_dataset(const CalibrationDataset& data);

/// Plane-to-image projective map, scaled to unit Frobenius norm with a
/// non-negative bottom-right entry.
class Homography {
 public:
  Homography(const Eigen::Matrix3d& h, double residual);

  const Eigen::Matrix3d& matrix() const noexcept { return h_; }
  /// Largest reprojection distance (pixels) over the fitted points.
  double residual() const noexcept { return residual_; }
  PixelPoint apply(const PlanePoint& p) const noexcept;

 private:
  Eigen::Matrix3d h_;
  double residual_;
};

/// Normalized DLT. Throws InsufficientData for fewer than 4 pairs and
/// DegenerateConfiguration for collinear or coincident points.
Homography estimate_homography(std::span<const PlanePoint> model_points, std::span<const PixelPoint> image_points);

/// Least-squares absolute conic B = A^-T A^-1 (unit Frobenius norm, positive
/// B11) from the orthonormality constraints of each homography. Throws
/// SingularConfiguration when the constraints are rank deficient.
Eigen::Matrix3d estimate_absolute_conic(std::span<const Homography> homographies);

/// Closed-form extraction of the five intrinsics from a conic.
IntrinsicParams intrinsics_from_conic(const Eigen::Matrix3d& b);

IntrinsicParams estimate_intrinsics_linear(std::span<const Homography> homographies);

/// Decomposes A^-1 H into [r1 r2 t], projects the rotation onto SO(3) and
/// picks the sign that puts `plane_centroid` in front of the camera.
Extrinsics estimate_extrinsics(const IntrinsicParams& a, const Homography& h, PlanePoint plane_centroid = {});

struct LinearInitialization {
  IntrinsicParams intrinsics;
  std::vector<Extrinsics> extrinsics;
  std::vector<Homography> homographies;
};

LinearInitialization initialize_linear(const CalibrationDataset& data);

/// Linear least-squares estimate of a model's coefficients with intrinsics
/// and extrinsics held fixed: every profile is N(r)/D(r) with N and D affine
/// in the coefficients, so (u - u0) N(r) = (u_d - u0) D(r) is linear.
std::vector<double> estimate_distortion_linear(const IntrinsicParams& a, std::span<const Extrinsics> extrinsics,
                                               int model_id, const CalibrationDataset& data);

/// Sum over views i and points j of |m_ij - m_hat_ij|^2 (squared pixels),
/// where m_hat is the distorted projection. Throws NonPositiveDepth or
/// SingularProfile naming the offending (view, point).
double compute_objective(const IntrinsicParams& a, std::span<const Extrinsics> extrinsics,
                         const DistortionModel& model, const CalibrationDataset& data);

enum class OptimizerMethod {
  LevenbergMarquardt,
  Bfgs,
};

std::string_view to_string(OptimizerMethod method) noexcept;

struct OptimizerOptions {
  double step_tolerance = 1e-5;
  double objective_tolerance = 1e-5;
  int max_iterations = 120;
  int max_function_evaluations = 8000;
  OptimizerMethod method = OptimizerMethod::LevenbergMarquardt;
  /// When false the five intrinsics are held at their initial values.
  bool refine_intrinsics = true;

  /// Throws InvalidArgument unless every tolerance and cap is positive.
  void validate() const;
};

enum class Termination {
  NotStarted,
  ObjectiveTolerance,
  StepTolerance,
  ZeroObjective,
  MaxIterations,
  MaxFunctionEvaluations,
  LineSearchFailure,
};

std::string_view to_string(Termination termination) noexcept;

struct CalibrationResult {
  IntrinsicParams intrinsics;
  std::vector<Extrinsics> extrinsics;
  DistortionModel model;
  double objective = 0.0;
  int iterations = 0;
  int function_evaluations = 0;
  bool converged = false;
  Termination termination = Termination::NotStarted;
  /// Objective after each accepted iteration, starting with the initial one.
  std::vector<double> history;
};

/// Starting point for refinement with the objective evaluated.
CalibrationResult make_initial_result(const IntrinsicParams& a, std::vector<Extrinsics> extrinsics,
                                      const DistortionModel& model, const CalibrationDataset& data);

/// Minimizes the objective jointly over intrinsics, every view's extrinsics
/// and the distortion coefficients. Never increases the objective; failures
/// of the search are reported through `converged` and `termination`.
CalibrationResult refine(const CalibrationResult& initial, const CalibrationDataset& data,
                         const OptimizerOptions& opts = {});

/// Coefficients of `model` re-expressed in a richer profile that contains it
/// (for example 1 + k r^2 inside 1 + k1 r + k2 r^2). Throws InvalidArgument
/// when `target_id` does not contain `model`.
DistortionModel embed_coefficients(const DistortionModel& model, int target_id);

struct ModelFitRow {
  int model_id = 0;
  double objective = 0.0;
  int rank = 0;
  std::vector<double> coefficients;
  double alpha = 0.0;
  double gamma = 0.0;
  double u0 = 0.0;
  double beta = 0.0;
  double v0 = 0.0;
  double initial_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  Termination termination = Termination::NotStarted;
  std::string error;
};

/// Rows sorted by model id; rank orders rows by ascending objective (ties to
/// the lower model id), 0 being the best.
struct ModelFitReport {
  std::vector<ModelFitRow> rows;
};

/// Sorts rows by model id and assigns ranks.
void assign_ranks(ModelFitReport& report);

struct CompareOptions {
  bool parallel = true;
  /// Start each model from a linear coefficient estimate instead of zero.
  bool linear_distortion_init = false;
};

ModelFitReport compare_models(const CalibrationDataset& data, std::span<const int> model_ids,
                              const OptimizerOptions& opts = {}, const CompareOptions& compare = {});

/// Same, reusing an existing linear initialization.
ModelFitReport compare_models(const CalibrationDataset& data, const LinearInitialization& init,
                              std::span<const int> model_ids, const OptimizerOptions& opts = {},
                              const CompareOptions& compare = {});

/// Linear initialization followed by refinement of a single model.
CalibrationResult calibrate(const CalibrationDataset& data, int model_id, const OptimizerOptions& opts = {},
                            bool linear_distortion_init = false);

}  // namespace raddist
