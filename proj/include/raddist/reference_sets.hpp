#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace raddist {

/// One published fit: objective, rank and parameters for a single model on
/// one image collection.
struct ReferenceFit {
  int model_id;
  double objective;
  int rank;
  std::vector<double> coefficients;
  double alpha;
  double gamma;
  double u0;
  double beta;
  double v0;
};

/// Ten fits (models 0..9, in order) obtained on one image collection.
struct ReferenceTable {
  std::string_view name;
  std::vector<ReferenceFit> fits;
};

/// The three reference collections: "microsoft", "desktop" and "odis".
/// Objectives are stored in squared pixels (not scaled by 1e3).
std::span<const ReferenceTable> reference_tables();

/// Coefficient vectors of one model across all reference collections.
std::vector<std::vector<double>> reference_coefficients(int model_id);

}  // namespace raddist
