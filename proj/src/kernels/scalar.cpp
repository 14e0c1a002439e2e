#include <cmath>

#include "raddist/kernels.hpp"

namespace raddist::kernels::scalar {
namespace {

// Same operation order as eval_profile. Returns false on a singular
// denominator.
inline bool profile(const ProfileParams& p, double r, double& f) noexcept {
  const double r2 = r * r;
  double den = 1.0;
  switch (p.model_id) {
    case 0: f = 1.0 + p.k1 * r2 + p.k2 * (r2 * r2); return true;
    case 1: f = 1.0 + p.k1 * r; return true;
    case 2: f = 1.0 + p.k1 * r2; return true;
    case 3: f = 1.0 + p.k1 * r + p.k2 * r2; return true;
    case 4:
      den = 1.0 + p.k1 * r;
      f = 1.0 / den;
      break;
    case 5:
      den = 1.0 + p.k1 * r2;
      f = 1.0 / den;
      break;
    case 6:
      den = 1.0 + p.k2 * r2;
      f = (1.0 + p.k1 * r) / den;
      break;
    case 7:
      den = 1.0 + p.k1 * r + p.k2 * r2;
      f = 1.0 / den;
      break;
    case 8:
      den = 1.0 + p.k2 * r + p.k3 * r2;
      f = (1.0 + p.k1 * r) / den;
      break;
    case 9:
      den = 1.0 + p.k2 * r + p.k3 * r2;
      f = (1.0 + p.k1 * r2) / den;
      break;
    default: return false;
  }
  return std::abs(den) >= kSingularDenominator;
}

}  // namespace

std::size_t distort(const ProfileParams& p, PointsView in, PointsOut out) noexcept {
  const std::size_t n = in.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = in.x[i];
    const double y = in.y[i];
    double f = 1.0;
    if (!profile(p, std::sqrt(x * x + y * y), f)) return i;
    out.x[i] = x * f;
    out.y[i] = y * f;
  }
  return kAllValid;
}

std::size_t distort_to_pixels(const ProfileParams& p, const PixelMap& m, PointsView in, PointsOut out) noexcept {
  const std::size_t n = in.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = in.x[i];
    const double y = in.y[i];
    double f = 1.0;
    if (!profile(p, std::sqrt(x * x + y * y), f)) return i;
    const double xd = x * f;
    const double yd = y * f;
    out.x[i] = m.alpha * xd + m.gamma * yd + m.u0;
    out.y[i] = m.beta * yd + m.v0;
  }
  return kAllValid;
}

}  // namespace raddist::kernels::scalar
