#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "raddist/calibration.hpp"
#include "raddist/core.hpp"
#include "raddist/distortion.hpp"
#include "raddist/reference_sets.hpp"

namespace raddist {

// ---------------------------------------------------------------------------
// Point files
//
// One point per line as two whitespace-separated decimal numbers. Lines whose
// first non-blank character is '#' and blank lines are ignored. model.txt
// holds "X Y" (Z = 0 implied); imageNNN.txt holds "u v".
// ---------------------------------------------------------------------------

struct PointPair {
  double a = 0.0;
  double b = 0.0;
};

/// Parses point-file text. Throws ParseError naming `label` and the 1-based
/// line on malformed, non-finite or extra fields.
std::vector<PointPair> parse_point_lines(std::string_view text, std::string_view label);

/// Renders pairs as "a b" lines using the round-trip format of format_double.
std::string format_point_lines(const std::vector<PointPair>& points);

/// "%.17g" rendering, which reads back to the identical double.
std::string format_double(double value);

/// Name of the i-th image file (0-based): image001.txt, image002.txt, ...
std::string image_file_name(std::size_t index);

/// Reads model.txt and image001.txt, image002.txt, ... until the first
/// missing index. Throws IoError, ParseError or CountMismatch (file, expected,
/// got) and runs validate_dataset on the result.
CalibrationDataset load_dataset(const std::filesystem::path& directory);

/// Writes model.txt and one image file per view, creating the directory.
void write_dataset(const CalibrationDataset& data, const std::filesystem::path& directory);

// ---------------------------------------------------------------------------
// Intrinsics file: "alpha gamma u0 beta v0" on one line.
// ---------------------------------------------------------------------------

IntrinsicParams parse_intrinsics(std::string_view text, std::string_view label);
IntrinsicParams read_intrinsics(const std::filesystem::path& file);
std::string format_intrinsics(const IntrinsicParams& a);
void write_intrinsics(const IntrinsicParams& a, const std::filesystem::path& file);

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Full description of a synthetic capture; generation is a pure function of
/// this value.
struct SynthSpec {
  IntrinsicParams intrinsics{830.0, 830.0, 0.2, 304.0, 207.0};
  std::vector<Extrinsics> views;
  std::vector<PlanePoint> model_points;
  DistortionModel model{0};
  /// Standard deviation of the isotropic Gaussian pixel noise.
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// cols x rows grid with the given pitch, centred on the plane origin.
std::vector<PlanePoint> grid_points(int cols, int rows, double pitch);

/// `count` plane poses at roughly `distance` from the camera, each tilted by
/// `tilt` radians about a different in-plane axis so that the views constrain
/// all five intrinsics.
std::vector<Extrinsics> default_views(std::size_t count, double distance, double tilt = 0.4);

/// Spec with the default 8x8 grid (pitch 0.03) seen from 0.55 units in `views`
/// poses.
SynthSpec default_synth_spec(std::size_t views = 3);

/// Observations are distort_pixel(project_ideal(...)) plus N(0, sigma^2) noise
/// on each coordinate. Throws NonPositiveDepth naming the view and
/// InvalidArgument for a negative sigma or an empty view list.
CalibrationDataset generate_synthetic(const SynthSpec& spec);

/// Ground-truth record written next to a synthetic dataset.
std::string format_ground_truth(const SynthSpec& spec);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// TSV table: header "model J rank k1 k2 k3 alpha gamma u0 beta v0", one row
/// per model in id order, four decimals, absent coefficients left empty.
std::string render_report(const ModelFitReport& report);

/// Report rows holding the published values of one reference collection.
ModelFitReport report_from_reference(const ReferenceTable& table);

/// Parses "0-9", "0,3,8" or a mix such as "0-2,7". Throws InvalidArgument on
/// malformed input, ids outside 0..9 or repeated ids.
std::vector<int> parse_model_list(std::string_view text);

/// Parses a comma-separated list of numbers such as "-0.0215,-0.1566".
std::vector<double> parse_number_list(std::string_view text);

}  // namespace raddist
