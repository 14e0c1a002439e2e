#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "raddist/distortion.hpp"

namespace raddist {

/// The depressed-form inversion problem y = x + p x^2 + q x^3.
struct CubicProblem {
  double y = 0.0;
  double p = 0.0;
  double q = 0.0;
};

/// The three (complex) roots of a cubic, in the order produced by the solver.
struct RootSet {
  std::array<std::complex<double>, 3> roots{};
};

/// A real root retained for one sign assumption on x.
struct BranchCandidate {
  double value = 0.0;
  int branch = 1;  // +1 or -1
};

/// Polynomial in ascending powers: c[0] + c[1] x + c[2] x^2 + c[3] x^3.
/// Unused high-order entries are zero.
struct Polynomial {
  std::array<double, 4> c{};

  int degree() const noexcept;
  double operator()(double x) const noexcept { return ((c[3] * x + c[2]) * x + c[1]) * x + c[0]; }
  double derivative(double x) const noexcept { return (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1]; }
};

/// Imaginary parts above this (relative to max(1, |re|)) mark a root complex.
inline constexpr double kImaginaryTolerance = 1e-8;

/// Closed-form roots of y = x + p x^2 + q x^3:
///
///   x1 = E1/(6q) + 2 E2/3 - p/(3q)
///   x2 = -E1/(12q) - E2/3 - p/(3q) + (sqrt(3)/2) (E1/(6q) - 2 E2/3) j
///   x3 = -E1/(12q) - E2/3 - p/(3q) - (sqrt(3)/2) (E1/(6q) - 2 E2/3) j
///
///   E1 = (36pq + 108yq^2 - 8p^3 + 12 sqrt(3) q sqrt(4q - p^2 + 18pqy + 27y^2q^2 - 4yp^3))^(1/3)
///   E2 = (p^2 - 3q) / (q E1)
///
/// The cube root is the principal complex root. The sign of the inner square
/// root is chosen so the two terms of E1^3 do not cancel; the root set is
/// invariant under that choice.
///
/// Throws DegenerateLeadingCoefficient when |q| < 1e-12.
RootSet solve_cubic_paper(const CubicProblem& prob);

/// All real roots of a polynomial of degree <= 3, ascending. Leading
/// coefficients below 1e-12 in magnitude are dropped. Each root receives a
/// Newton polish step. Throws ZeroPolynomial when every coefficient is below
/// 1e-15 in magnitude.
std::vector<double> solve_poly_real(std::span<const double> coeffs);

/// Polynomial in x whose real roots of sign `branch` are the undistortion
/// candidates for distorted abscissa x_d on the ray described by `aux`.
/// Throws UnsupportedModel for model 0 and InvalidArgument for x_d == 0.
Polynomial branch_reduce(const DistortionModel& model, double x_d, const RadialAuxiliaries& aux, int branch);

/// Best admissible root for one branch, or nullopt when none survives.
std::optional<BranchCandidate> branch_candidate(const DistortionModel& model, double x_d,
                                                const RadialAuxiliaries& aux, int branch);

/// Analytical undistortion. Model 0 has no closed form and is delegated to
/// undistort_numeric. Throws NoRealCandidate when neither branch admits a
/// root.
NormalizedPoint undistort_normalized(const DistortionModel& model, const NormalizedPoint& pd);

struct NumericOptions {
  double r_max = 2.0;
  int scan_steps = 256;
};

/// Bracketed bisection plus Newton polish on the radial equation
/// rho f(rho) = |pd|, taking the first crossing in [0, r_max]. Throws
/// BracketNotFound when no crossing exists.
NormalizedPoint undistort_numeric(const DistortionModel& model, const NormalizedPoint& pd,
                                  const NumericOptions& opts = {});

PixelPoint undistort_pixel(const IntrinsicParams& a, const DistortionModel& model, const PixelPoint& pd);

}  // namespace raddist
