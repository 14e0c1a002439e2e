#include "raddist/distortion.hpp"

#include <cmath>
#include <string>

namespace raddist {
namespace {

void check_denominator(double den, int model_id, double r) {
  if (!(std::abs(den) >= kSingularDenominator)) {
    throw Error(ErrorKind::SingularProfile, "model " + std::to_string(model_id) + " denominator " +
                                                std::to_string(den) + " vanishes at r=" + std::to_string(r));
  }
}

}  // namespace

std::size_t coefficient_arity(int model_id) {
  switch (model_id) {
    case 1:
    case 2:
    case 4:
    case 5:
      return 1;
    case 0:
    case 3:
    case 6:
    case 7:
      return 2;
    case 8:
    case 9:
      return 3;
    default:
      throw Error(ErrorKind::UnknownModel, "model id " + std::to_string(model_id) + " is not in 0..9");
  }
}

DistortionModel::DistortionModel(int model_id) : id_(model_id), arity_(coefficient_arity(model_id)) {}

DistortionModel::DistortionModel(int model_id, std::span<const double> coefficients)
    : id_(model_id), arity_(coefficient_arity(model_id)) {
  if (coefficients.size() != arity_) {
    throw Error(ErrorKind::InvalidArgument, "model " + std::to_string(model_id) + " takes " + std::to_string(arity_) +
                                                " coefficient(s), got " + std::to_string(coefficients.size()));
  }
  for (std::size_t i = 0; i < arity_; ++i) {
    if (!std::isfinite(coefficients[i])) {
      throw Error(ErrorKind::InvalidArgument, "distortion coefficients must be finite");
    }
    k_[i] = coefficients[i];
  }
}

DistortionModel::DistortionModel(int model_id, std::initializer_list<double> coefficients)
    : DistortionModel(model_id, std::span<const double>(coefficients.begin(), coefficients.size())) {}

DistortionModel DistortionModel::with_coefficients(std::span<const double> coefficients) const {
  return DistortionModel(id_, coefficients);
}

RadialAuxiliaries RadialAuxiliaries::from_slope(double c, double x) {
  const double t = 1.0 + c * c;
  return {c, std::sqrt(t), t, signum(x)};
}

double eval_profile(const DistortionModel& model, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::InvalidArgument, "radius must be finite and non-negative");
  }
  // The operation order here is mirrored by the batch kernels.
  const double r2 = r * r;
  const double k1 = model.k(0);
  const double k2 = model.k(1);
  const double k3 = model.k(2);
  switch (model.id()) {
    case 0: return 1.0 + k1 * r2 + k2 * (r2 * r2);
    case 1: return 1.0 + k1 * r;
    case 2: return 1.0 + k1 * r2;
    case 3: return 1.0 + k1 * r + k2 * r2;
    case 4: {
      const double den = 1.0 + k1 * r;
      check_denominator(den, 4, r);
      return 1.0 / den;
    }
    case 5: {
      const double den = 1.0 + k1 * r2;
      check_denominator(den, 5, r);
      return 1.0 / den;
    }
    case 6: {
      const double den = 1.0 + k2 * r2;
      check_denominator(den, 6, r);
      return (1.0 + k1 * r) / den;
    }
    case 7: {
      const double den = 1.0 + k1 * r + k2 * r2;
      check_denominator(den, 7, r);
      return 1.0 / den;
    }
    case 8: {
      const double den = 1.0 + k2 * r + k3 * r2;
      check_denominator(den, 8, r);
      return (1.0 + k1 * r) / den;
    }
    case 9: {
      const double den = 1.0 + k2 * r + k3 * r2;
      check_denominator(den, 9, r);
      return (1.0 + k1 * r2) / den;
    }
    default:
      throw Error(ErrorKind::UnknownModel, "model id " + std::to_string(model.id()));
  }
}

NormalizedPoint distort_normalized(const DistortionModel& model, const NormalizedPoint& p) {
  const double f = eval_profile(model, std::sqrt(p.x * p.x + p.y * p.y));
  return {p.x * f, p.y * f};
}

PixelPoint distort_pixel(const IntrinsicParams& a, const DistortionModel& model, const PixelPoint& p) {
  return denormalize(a, distort_normalized(model, normalize(a, p)));
}

double distort_along_ray(const DistortionModel& model, double x, double c) {
  const RadialAuxiliaries aux = RadialAuxiliaries::from_slope(c, x);
  const double lin = aux.s * x * aux.sigma;  // sqrt(1+c^2) x sgn(x)
  const double quad = aux.t * x * x;         // (1+c^2) x^2
  const double k1 = model.k(0);
  const double k2 = model.k(1);
  const double k3 = model.k(2);
  double num = 1.0;
  double den = 1.0;
  switch (model.id()) {
    case 0: num = 1.0 + k1 * quad + k2 * (aux.t * aux.t) * (x * x * x * x); break;
    case 1: num = 1.0 + k1 * lin; break;
    case 2: num = 1.0 + k1 * quad; break;
    case 3: num = 1.0 + k1 * lin + k2 * quad; break;
    case 4: den = 1.0 + k1 * lin; break;
    case 5: den = 1.0 + k1 * quad; break;
    case 6:
      num = 1.0 + k1 * lin;
      den = 1.0 + k2 * quad;
      break;
    case 7: den = 1.0 + k1 * lin + k2 * quad; break;
    case 8:
      num = 1.0 + k1 * lin;
      den = 1.0 + k2 * lin + k3 * quad;
      break;
    case 9:
      num = 1.0 + k1 * quad;
      den = 1.0 + k2 * lin + k3 * quad;
      break;
    default:
      throw Error(ErrorKind::UnknownModel, "model id " + std::to_string(model.id()));
  }
  check_denominator(den, model.id(), std::abs(x) * aux.s);
  return x * num / den;
}

}  // namespace raddist
