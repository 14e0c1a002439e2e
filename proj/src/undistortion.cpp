#include "raddist/undistortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace raddist {
namespace {

using cplx = std::complex<double>;

constexpr double kLeadingEpsilon = 1e-12;
constexpr double kZeroPolynomialEpsilon = 1e-15;

bool is_real_root(const cplx& z) { return std::abs(z.imag()) <= kImaginaryTolerance * std::max(1.0, std::abs(z.real())); }

// Newton steps that are kept only while they reduce the residual.
double polish(const Polynomial& poly, double x, int steps) {
  double best = x;
  double best_res = std::abs(poly(x));
  for (int i = 0; i < steps && best_res > 0.0; ++i) {
    const double d = poly.derivative(best);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double next = best - poly(best) / d;
    const double res = std::abs(poly(next));
    if (!(res < best_res)) break;
    best = next;
    best_res = res;
  }
  return best;
}

std::vector<double> quadratic_roots(double c0, double c1, double c2) {
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  const double scale = c1 * c1 + std::abs(4.0 * c2 * c0);
  if (disc < 0.0) {
    if (disc < -1e-14 * scale) return {};
    const double x = -c1 / (2.0 * c2);
    return {x, x};
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
  if (q == 0.0) return {0.0, 0.0};
  return {q / c2, c0 / q};
}

std::vector<double> cubic_roots(double c0, double c1, double c2, double c3) {
  // Monic form x^3 + a x^2 + b x + c.
  const double a = c2 / c3;
  const double b = c1 / c3;
  const double c = c0 / c3;
  const double q = (a * a - 3.0 * b) / 9.0;
  const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
  const double q3 = q * q * q;
  if (r * r < q3) {
    const double theta = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
    const double m = -2.0 * std::sqrt(q);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return {m * std::cos(theta / 3.0) - a / 3.0, m * std::cos((theta + two_pi) / 3.0) - a / 3.0,
            m * std::cos((theta - two_pi) / 3.0) - a / 3.0};
  }
  const double big = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q3)), r);
  const double small = big == 0.0 ? 0.0 : q / big;
  const Polynomial monic{{c, b, a, 1.0}};
  const double x1 = polish(monic, (big + small) - a / 3.0, 3);
  // Deflate to catch a (near-)double pair that the one-real-root branch
  // cannot represent.
  std::vector<double> roots{x1};
  for (double x : quadratic_roots(b + x1 * (a + x1), a + x1, 1.0)) roots.push_back(x);
  return roots;
}

}  // namespace

int Polynomial::degree() const noexcept {
  for (int d = 3; d > 0; --d) {
    if (c[static_cast<std::size_t>(d)] != 0.0) return d;
  }
  return 0;
}

RootSet solve_cubic_paper(const CubicProblem& prob) {
  const double y = prob.y;
  const double p = prob.p;
  const double q = prob.q;
  if (!(std::abs(q) >= kLeadingEpsilon)) {
    throw Error(ErrorKind::DegenerateLeadingCoefficient, "cubic coefficient q=" + std::to_string(q) + " is degenerate");
  }
  const double sqrt3 = std::numbers::sqrt3;
  const double lead = 36.0 * p * q + 108.0 * y * q * q - 8.0 * p * p * p;
  const double inner = 4.0 * q - p * p + 18.0 * p * q * y + 27.0 * y * y * q * q - 4.0 * y * p * p * p;
  const cplx radical = 12.0 * sqrt3 * q * std::sqrt(cplx(inner, 0.0));
  const cplx e1_plus = lead + radical;
  const cplx e1_minus = lead - radical;
  const cplx e1_cube = std::abs(e1_plus) >= std::abs(e1_minus) ? e1_plus : e1_minus;

  const cplx shift(-p / (3.0 * q), 0.0);
  RootSet out;
  if (std::abs(e1_cube) == 0.0) {
    // Triple root.
    out.roots = {shift, shift, shift};
    return out;
  }
  const cplx e1 = std::pow(e1_cube, 1.0 / 3.0);
  const cplx e2 = (p * p - 3.0 * q) / (q * e1);
  const cplx j(0.0, 1.0);
  const cplx a = e1 / (6.0 * q);
  const cplx b = 2.0 * e2 / 3.0;
  const cplx mid = -e1 / (12.0 * q) - e2 / 3.0 + shift;
  const cplx offset = (sqrt3 / 2.0) * (a - b) * j;
  out.roots = {a + b + shift, mid + offset, mid - offset};
  return out;
}

std::vector<double> solve_poly_real(std::span<const double> coeffs) {
  if (coeffs.empty() || coeffs.size() > 4) {
    throw Error(ErrorKind::InvalidArgument, "solve_poly_real expects 1 to 4 coefficients");
  }
  Polynomial poly;
  std::copy(coeffs.begin(), coeffs.end(), poly.c.begin());
  if (std::all_of(poly.c.begin(), poly.c.end(), [](double v) { return std::abs(v) < kZeroPolynomialEpsilon; })) {
    throw Error(ErrorKind::ZeroPolynomial, "all coefficients vanish");
  }
  int degree = 3;
  while (degree > 0 && std::abs(poly.c[static_cast<std::size_t>(degree)]) < kLeadingEpsilon) {
    poly.c[static_cast<std::size_t>(degree)] = 0.0;
    --degree;
  }

  std::vector<double> roots;
  switch (degree) {
    case 0: return roots;
    case 1: roots = {-poly.c[0] / poly.c[1]}; break;
    case 2: roots = quadratic_roots(poly.c[0], poly.c[1], poly.c[2]); break;
    default: roots = cubic_roots(poly.c[0], poly.c[1], poly.c[2], poly.c[3]); break;
  }
  for (double& x : roots) x = polish(poly, x, 2);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

Polynomial branch_reduce(const DistortionModel& model, double x_d, const RadialAuxiliaries& aux, int branch) {
  if (model.id() == 0) {
    throw Error(ErrorKind::UnsupportedModel, "model 0 has no polynomial reduction of degree <= 3");
  }
  if (x_d == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "branch reduction requires a nonzero distorted coordinate");
  }
  if (branch != 1 && branch != -1) {
    throw Error(ErrorKind::InvalidArgument, "branch must be +1 or -1");
  }
  const double sgn_s = branch * aux.s;  // sigma sqrt(1+c^2)
  const double t = aux.t;
  const double k1 = model.k(0);
  const double k2 = model.k(1);
  const double k3 = model.k(2);
  Polynomial poly;
  auto& c = poly.c;
  switch (model.id()) {
    case 1:
      c = {-x_d, 1.0, k1 * sgn_s, 0.0};
      break;
    case 2:
      c = {-x_d, 1.0, 0.0, k1 * t};
      break;
    case 3:
      c = {-x_d, 1.0, k1 * sgn_s, k2 * t};
      break;
    case 4:
      c = {-x_d, 1.0 - x_d * k1 * sgn_s, 0.0, 0.0};
      break;
    case 5:
      c = {x_d, -1.0, k1 * t * x_d, 0.0};
      break;
    case 6:
      c = {-x_d, 1.0, k1 * sgn_s - x_d * k2 * t, 0.0};
      break;
    case 7:
      c = {x_d, x_d * k1 * sgn_s - 1.0, x_d * k2 * t, 0.0};
      break;
    case 8:
      c = {-x_d, 1.0 - x_d * k2 * sgn_s, k1 * sgn_s - x_d * k3 * t, 0.0};
      break;
    case 9:
      c = {-x_d, 1.0 - x_d * k2 * sgn_s, -x_d * k3 * t, k1 * t};
      break;
    default:
      throw Error(ErrorKind::UnknownModel, "model id " + std::to_string(model.id()));
  }
  return poly;
}

std::optional<BranchCandidate> branch_candidate(const DistortionModel& model, double x_d,
                                                const RadialAuxiliaries& aux, int branch) {
  const Polynomial poly = branch_reduce(model, x_d, aux, branch);

  std::vector<double> real_roots;
  bool solved = false;
  if (poly.c[3] != 0.0 && std::abs(poly.c[1]) >= kLeadingEpsilon) {
    // Bring the cubic to y = x + p x^2 + q x^3 and use the closed form.
    const CubicProblem prob{-poly.c[0] / poly.c[1], poly.c[2] / poly.c[1], poly.c[3] / poly.c[1]};
    if (std::abs(prob.q) >= kLeadingEpsilon) {
      for (const cplx& z : solve_cubic_paper(prob).roots) {
        if (is_real_root(z)) real_roots.push_back(z.real());
      }
      solved = true;
    }
  }
  if (!solved) {
    try {
      real_roots = solve_poly_real(poly.c);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroPolynomial) throw;
    }
  }

  std::optional<BranchCandidate> best;
  for (double x : real_roots) {
    x = polish(poly, x, 3);
    if (!(x * branch > 0.0)) continue;
    // Roots introduced by clearing a denominator that vanishes together with
    // the numerator do not satisfy the forward map.
    try {
      const double fwd = distort_along_ray(model, x, aux.c);
      if (!(std::abs(fwd - x_d) <= 1e-6 * std::max(1.0, std::abs(x_d)))) continue;
    } catch (const Error&) {
      continue;
    }
    if (!best || std::abs(x - x_d) < std::abs(best->value - x_d)) best = BranchCandidate{x, branch};
  }
  return best;
}

NormalizedPoint undistort_normalized(const DistortionModel& model, const NormalizedPoint& pd) {
  if (pd.x == 0.0 && pd.y == 0.0) return {0.0, 0.0};
  if (model.id() == 0) return undistort_numeric(model, pd);

  // Work along the dominant axis so the slope stays in [-1, 1]; the
  // distortion is symmetric in x and y.
  const bool swapped = std::abs(pd.y) > std::abs(pd.x);
  const double lead = swapped ? pd.y : pd.x;
  const double other = swapped ? pd.x : pd.y;
  const double c = other / lead;
  const RadialAuxiliaries aux = RadialAuxiliaries::from_slope(c, lead);

  const auto plus = branch_candidate(model, lead, aux, +1);
  const auto minus = branch_candidate(model, lead, aux, -1);
  std::optional<BranchCandidate> chosen;
  if (plus && minus) {
    const double dp = std::abs(plus->value - lead);
    const double dm = std::abs(minus->value - lead);
    if (dp < dm) {
      chosen = plus;
    } else if (dm < dp) {
      chosen = minus;
    } else {
      chosen = lead > 0.0 ? plus : minus;
    }
  } else {
    chosen = plus ? plus : minus;
  }
  if (!chosen) {
    throw Error(ErrorKind::NoRealCandidate, "no admissible root for distorted point (" + std::to_string(pd.x) + ", " +
                                                std::to_string(pd.y) + ") under model " + std::to_string(model.id()));
  }
  const double x = chosen->value;
  const double y = c * x;
  return swapped ? NormalizedPoint{y, x} : NormalizedPoint{x, y};
}

NormalizedPoint undistort_numeric(const DistortionModel& model, const NormalizedPoint& pd, const NumericOptions& opts) {
  const double rd = std::hypot(pd.x, pd.y);
  if (rd == 0.0) return {0.0, 0.0};
  if (!(opts.r_max > 0.0) || opts.scan_steps < 1) {
    throw Error(ErrorKind::InvalidArgument, "numeric inversion needs r_max > 0 and at least one scan step");
  }
  auto residual = [&](double rho) { return rho * eval_profile(model, rho) - rd; };

  // Scan for the first sign change of rho f(rho) - rd; G(0) = -rd < 0.
  double lo = 0.0;
  double hi = -1.0;
  for (int i = 1; i <= opts.scan_steps; ++i) {
    const double rho = opts.r_max * static_cast<double>(i) / static_cast<double>(opts.scan_steps);
    double g = 0.0;
    try {
      g = residual(rho);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SingularProfile) break;
      throw;
    }
    if (g >= 0.0) {
      hi = rho;
      break;
    }
    lo = rho;
  }
  if (hi < 0.0) {
    throw Error(ErrorKind::BracketNotFound, "no crossing of the radial profile for |pd|=" + std::to_string(rd) +
                                                " within [0, " + std::to_string(opts.r_max) + "]");
  }

  // Residual that maps a singular denominator to NaN instead of throwing.
  auto safe_residual = [&](double r) {
    try {
      return residual(r);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SingularProfile) return std::numeric_limits<double>::quiet_NaN();
      throw;
    }
  };

  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = safe_residual(mid);
    if (std::isnan(g)) break;
    (g < 0.0 ? lo : hi) = mid;
  }
  const double g_lo = safe_residual(lo);
  const double g_hi = safe_residual(hi);
  double rho = std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
  double g_rho = std::min(std::abs(g_lo), std::abs(g_hi));
  // A sign change across a pole of the profile is not a root.
  if (!(g_rho <= 1e-9 * std::max(1.0, rd))) {
    throw Error(ErrorKind::BracketNotFound, "the radial profile has a pole, not a root, near rho=" +
                                                std::to_string(rho) + " for |pd|=" + std::to_string(rd));
  }

  // Newton polish with a central-difference slope.
  for (int i = 0; i < 2; ++i) {
    const double h = 1e-7 * std::max(rho, 1e-3);
    const double below = std::max(rho - h, 0.0);
    const double slope = (safe_residual(rho + h) - safe_residual(below)) / (rho + h - below);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double next = rho - safe_residual(rho) / slope;
    const double g_next = next > 0.0 ? std::abs(safe_residual(next)) : std::numeric_limits<double>::quiet_NaN();
    if (!(g_next < g_rho)) break;
    rho = next;
    g_rho = g_next;
  }

  const double scale = rho / rd;
  return {pd.x * scale, pd.y * scale};
}

PixelPoint undistort_pixel(const IntrinsicParams& a, const DistortionModel& model, const PixelPoint& pd) {
  return denormalize(a, undistort_normalized(model, normalize(a, pd)));
}

}  // namespace raddist
