#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "raddist/calibration.hpp"

namespace raddist::detail {

enum class ResidualStatus { Ok, NonPositiveDepth, SingularProfile };

struct ResidualFailure {
  ResidualStatus status = ResidualStatus::Ok;
  std::size_t view = 0;
  std::size_t point = 0;
};

/// Scratch buffers reused across evaluations.
struct ResidualWorkspace {
  std::vector<double> x, y, u, v;
};

/// Fills `out` (length 2 N n) with observed minus predicted pixel coordinates,
/// view-major, u before v.
ResidualFailure evaluate_residuals(const IntrinsicParams& a, std::span<const Extrinsics> extrinsics,
                                   const DistortionModel& model, const CalibrationDataset& data,
                                   std::span<double> out, ResidualWorkspace& ws);

/// Sum of squared residuals accumulated point by point in a fixed order.
double sum_of_squares(std::span<const double> residuals) noexcept;

}  // namespace raddist::detail
