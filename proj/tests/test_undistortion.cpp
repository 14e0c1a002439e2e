#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "raddist/undistortion.hpp"
#include "support.hpp"

using namespace raddist;

namespace {

double cubic_residual(const CubicProblem& p, std::complex<double> x) {
  return std::abs(x + p.p * x * x + p.q * x * x * x - p.y);
}

// Greedy matching of two root multisets; returns the largest distance.
double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  double worst = 0.0;
  for (const auto& x : a) {
    auto best = std::min_element(b.begin(), b.end(), [&](auto l, auto r) { return std::abs(l - x) < std::abs(r - x); });
    worst = std::max(worst, std::abs(*best - x));
    b.erase(best);
  }
  return worst;
}

}  // namespace

TEST_SUITE("undistortion") {
  TEST_CASE("closed-form cubic matches the companion-matrix oracle") {
    const CubicProblem probs[] = {{0.3, -0.2, 0.7}, {-1.0, 2.0, 0.05}, {0.0, 0.5, -3.0}, {2.5, -4.0, 9.0}};
    for (const CubicProblem& p : probs) {
      const RootSet rs = solve_cubic_paper(p);
      const auto oracle = test::companion_roots({-p.y, 1.0, p.p, p.q});
      std::vector<std::complex<double>> mine(rs.roots.begin(), rs.roots.end());
      CHECK(multiset_distance(mine, oracle) < 1e-10);
      for (const auto& x : rs.roots) CHECK(cubic_residual(p, x) < 1e-10);
    }
  }

  TEST_CASE("closed-form cubic handles a triple root") {
    // (1 + x/3)^3 expanded: 1 + x + x^2/3 + x^3/27, i.e. y = -1, p = 1/3, q = 1/27.
    const RootSet rs = solve_cubic_paper({-1.0, 1.0 / 3.0, 1.0 / 27.0});
    for (const auto& x : rs.roots) CHECK(std::abs(x - std::complex<double>(-3.0, 0.0)) < 1e-4);
  }

  TEST_CASE("closed-form cubic rejects a vanishing leading coefficient") {
    try {
      solve_cubic_paper({1.0, 0.5, 1e-14});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateLeadingCoefficient);
    }
  }

  TEST_CASE("real-root solver for degrees 1 to 3") {
    const std::vector<double> linear{-2.0, 4.0};
    CHECK(solve_poly_real(linear) == std::vector<double>{0.5});

    const std::vector<double> quad{6.0, -5.0, 1.0};  // (x-2)(x-3)
    const auto q = solve_poly_real(quad);
    REQUIRE(q.size() == 2);
    CHECK(q[0] == doctest::Approx(2.0));
    CHECK(q[1] == doctest::Approx(3.0));

    const std::vector<double> no_real{1.0, 0.0, 1.0};
    CHECK(solve_poly_real(no_real).empty());

    const std::vector<double> cubic{6.0, -11.0, 6.0, -1.0};  // -(x-1)(x-2)(x-3)
    const auto c = solve_poly_real(cubic);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(2.0));
    CHECK(c[2] == doctest::Approx(3.0));

    const std::vector<double> dropped{1.0, 1.0, 0.0, 1e-14};  // leading term below threshold
    CHECK(solve_poly_real(dropped) == std::vector<double>{-1.0});

    const std::vector<double> zero{0.0, 1e-16, 0.0};
    try {
      solve_poly_real(zero);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ZeroPolynomial);
    }
  }

  TEST_CASE("branch polynomials vanish at the true undistorted abscissa") {
    for (int id = 1; id < kModelCount; ++id) {
      for (const auto& k : reference_coefficients(id)) {
        const DistortionModel m(id, k);
        for (const NormalizedPoint p : {NormalizedPoint{0.3, 0.1}, NormalizedPoint{-0.2, 0.15}, NormalizedPoint{0.25, -0.3}}) {
          const NormalizedPoint d = distort_normalized(m, p);
          const double c = p.y / p.x;
          const RadialAuxiliaries aux = RadialAuxiliaries::from_slope(c, p.x);
          const Polynomial poly = branch_reduce(m, d.x, aux, p.x > 0 ? 1 : -1);
          const double scale = std::max({std::abs(poly.c[0]), std::abs(poly.c[1]), std::abs(poly.c[2]), std::abs(poly.c[3])});
          CAPTURE(id);
          CHECK(std::abs(poly(p.x)) <= 1e-12 * scale);
          const auto cand = branch_candidate(m, d.x, aux, p.x > 0 ? 1 : -1);
          REQUIRE(cand.has_value());
          CHECK(cand->value == doctest::Approx(p.x).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("branch reduction preconditions") {
    const RadialAuxiliaries aux = RadialAuxiliaries::from_slope(0.5, 1.0);
    CHECK_THROWS_AS(branch_reduce(DistortionModel(0, {0.1, 0.1}), 0.3, aux, 1), Error);
    CHECK_THROWS_AS(branch_reduce(DistortionModel(3, {0.1, 0.1}), 0.0, aux, 1), Error);
    CHECK_THROWS_AS(branch_reduce(DistortionModel(3, {0.1, 0.1}), 0.3, aux, 0), Error);
  }

  TEST_CASE("undistortion inverts every model on the reference coefficients") {
    for (int id = 0; id < kModelCount; ++id) {
      for (const auto& k : reference_coefficients(id)) {
        const DistortionModel m(id, k);
        for (const NormalizedPoint p : {NormalizedPoint{0.3, 0.1}, NormalizedPoint{-0.01, 0.45}, NormalizedPoint{0.0, -0.2},
                                        NormalizedPoint{-0.35, 0.0}, NormalizedPoint{0.2, -0.2}}) {
          const NormalizedPoint q = undistort_normalized(m, distort_normalized(m, p));
          CAPTURE(id);
          CHECK(std::abs(q.x - p.x) < 1e-12);
          CHECK(std::abs(q.y - p.y) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("origin and identity profiles map to themselves") {
    for (int id = 0; id < kModelCount; ++id) {
      const DistortionModel zero(id);
      CHECK(undistort_normalized(zero, {0.0, 0.0}) == NormalizedPoint{0.0, 0.0});
      const NormalizedPoint q = undistort_normalized(zero, {0.12, -0.34});
      CHECK(q.x == doctest::Approx(0.12).epsilon(1e-14));
      CHECK(q.y == doctest::Approx(-0.34).epsilon(1e-14));
    }
  }

  TEST_CASE("unreachable distorted radius yields NoRealCandidate") {
    // x / (1 + x^2) never exceeds 1/2 in magnitude.
    try {
      undistort_normalized(DistortionModel(5, {1.0}), {0.6, 0.0});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoRealCandidate);
    }
  }

  TEST_CASE("numeric inversion brackets the first crossing") {
    const DistortionModel m(0, {-0.3554, 0.1633});
    const NormalizedPoint p{0.4, -0.3};
    const NormalizedPoint q = undistort_numeric(m, distort_normalized(m, p));
    CHECK(std::abs(q.x - p.x) < 1e-12);
    CHECK(std::abs(q.y - p.y) < 1e-12);
    try {
      // r (1 - r^2) peaks at about 0.385.
      undistort_numeric(DistortionModel(0, {-1.0, 0.0}), {0.5, 0.0});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BracketNotFound);
    }
    CHECK_THROWS_AS(undistort_numeric(m, {0.1, 0.1}, NumericOptions{0.0, 10}), Error);
  }

  TEST_CASE("numeric inversion does not mistake a pole for a root") {
    // f = (1 - 10 r) / (1 - 3.9 r^2): r f stays below 0.03 before the pole at
    // r ~ 0.506 and jumps from -inf to +inf across it, so |pd| = 0.1 has a
    // sign change but no root.
    try {
      undistort_numeric(DistortionModel(6, {-10.0, -3.9}), {0.1, 0.0});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BracketNotFound);
    }
  }

  TEST_CASE("pixel undistortion inverts pixel distortion") {
    const IntrinsicParams a(832.486, 832.5157, 0.2042, 303.9605, 206.5811);
    const DistortionModel m(3, {-0.0215, -0.1566});
    const PixelPoint p{100.0, 400.0};
    const PixelPoint q = undistort_pixel(a, m, distort_pixel(a, m, p));
    CHECK(q.u == doctest::Approx(p.u).epsilon(1e-12));
    CHECK(q.v == doctest::Approx(p.v).epsilon(1e-12));
  }
}
