#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "raddist/calibration.hpp"
#include "raddist/io.hpp"
#include "support.hpp"

using namespace raddist;

namespace {

SynthSpec plain_spec(const IntrinsicParams& a, std::size_t views = 3) {
  SynthSpec spec = default_synth_spec(views);
  spec.intrinsics = a;
  return spec;
}

void check_relative(double got, double want, double tol) {
  CAPTURE(got);
  CAPTURE(want);
  CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

}  // namespace

TEST_SUITE("calibration") {
  TEST_CASE("homography reprojects noise-free points exactly") {
    const SynthSpec spec = plain_spec(IntrinsicParams(830.0, 830.0, 0.2, 304.0, 207.0));
    const CalibrationDataset data = generate_synthetic(spec);
    for (const auto& obs : data.observations) {
      const Homography h = estimate_homography(data.model_points, obs);
      CHECK(h.matrix().norm() == doctest::Approx(1.0));
      CHECK(h.matrix()(2, 2) >= 0.0);
      CHECK(h.residual() < 1e-8);
      for (std::size_t j = 0; j < obs.size(); ++j) {
        const PixelPoint p = h.apply(data.model_points[j]);
        CHECK(std::hypot(p.u - obs[j].u, p.v - obs[j].v) <= h.residual() + 1e-12);
      }
    }
  }

  TEST_CASE("homography rejects too few or collinear points") {
    const std::vector<PlanePoint> three{{0, 0}, {1, 0}, {0, 1}};
    const std::vector<PixelPoint> three_img{{0, 0}, {1, 0}, {0, 1}};
    try {
      estimate_homography(three, three_img);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InsufficientData);
    }
    const std::vector<PlanePoint> line{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
    const std::vector<PixelPoint> line_img{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
    try {
      estimate_homography(line, line_img);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateConfiguration);
    }
  }

  TEST_CASE("linear intrinsics recover noise-free ground truth within 1e-6") {
    const IntrinsicParams truth(832.5, 832.5, 0.2, 303.96, 206.58);
    const CalibrationDataset data = generate_synthetic(plain_spec(truth));
    const LinearInitialization init = initialize_linear(data);
    check_relative(init.intrinsics.alpha(), truth.alpha(), 1e-6);
    check_relative(init.intrinsics.beta(), truth.beta(), 1e-6);
    check_relative(init.intrinsics.u0(), truth.u0(), 1e-6);
    check_relative(init.intrinsics.v0(), truth.v0(), 1e-6);
    CHECK(std::abs(init.intrinsics.gamma() - truth.gamma()) < 1e-6 * truth.alpha());
  }

  TEST_CASE("extrinsics match the generator's poses") {
    const IntrinsicParams truth(832.5, 832.5, 0.2, 303.96, 206.58);
    const SynthSpec spec = plain_spec(truth, 4);
    const CalibrationDataset data = generate_synthetic(spec);
    const LinearInitialization init = initialize_linear(data);
    REQUIRE(init.extrinsics.size() == spec.views.size());
    for (std::size_t i = 0; i < spec.views.size(); ++i) {
      CHECK((init.extrinsics[i].rotation_matrix() - spec.views[i].rotation_matrix()).norm() < 1e-6);
      CHECK((init.extrinsics[i].translation - spec.views[i].translation).norm() < 1e-6);
      // With the true intrinsics the decomposition is just as accurate.
      const Extrinsics e = estimate_extrinsics(truth, init.homographies[i]);
      CHECK((e.translation - spec.views[i].translation).norm() < 1e-6);
    }
  }

  TEST_CASE("parallel planes leave the conic undetermined") {
    SynthSpec spec = plain_spec(IntrinsicParams(800.0, 800.0, 0.0, 320.0, 240.0));
    for (std::size_t i = 0; i < spec.views.size(); ++i) {
      spec.views[i].rotation = Eigen::Vector3d::Zero();
      spec.views[i].translation = Eigen::Vector3d(0.01 * static_cast<double>(i), 0.0, 0.5 + 0.1 * static_cast<double>(i));
    }
    const CalibrationDataset data = generate_synthetic(spec);
    try {
      initialize_linear(data);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularConfiguration);
    }
  }

  TEST_CASE("linear pipeline alone reaches J < 1e-6 N n without distortion") {
    const CalibrationDataset data = generate_synthetic(plain_spec(IntrinsicParams(830.0, 830.0, 0.2, 304.0, 207.0)));
    const LinearInitialization init = initialize_linear(data);
    const double j = compute_objective(init.intrinsics, init.extrinsics, DistortionModel(0), data);
    CHECK(j < 1e-6 * static_cast<double>(data.view_count() * data.point_count()));
  }

  TEST_CASE("dataset validation") {
    const CalibrationDataset good = generate_synthetic(plain_spec(IntrinsicParams(830.0, 830.0, 0.2, 304.0, 207.0)));
    CHECK_NOTHROW(validate_dataset(good));

    CalibrationDataset two_views = good;
    two_views.observations.pop_back();
    CHECK_THROWS_AS(validate_dataset(two_views), Error);

    CalibrationDataset misaligned = good;
    misaligned.observations[1].pop_back();
    try {
      validate_dataset(misaligned);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CountMismatch);
    }

    CalibrationDataset duplicate_view = good;
    duplicate_view.observations[2] = duplicate_view.observations[0];
    CHECK_THROWS_AS(validate_dataset(duplicate_view), Error);

    CalibrationDataset duplicate_point = good;
    duplicate_point.model_points[5] = duplicate_point.model_points[4];
    CHECK_THROWS_AS(validate_dataset(duplicate_point), Error);

    CalibrationDataset collinear = good;
    for (std::size_t j = 0; j < collinear.point_count(); ++j) collinear.model_points[j] = {0.01 * static_cast<double>(j), 0.0};
    CHECK_THROWS_AS(validate_dataset(collinear), Error);

    CalibrationDataset collinear_image = good;
    for (std::size_t j = 0; j < collinear_image.point_count(); ++j) {
      collinear_image.observations[1][j] = {static_cast<double>(j), 2.0 * static_cast<double>(j)};
    }
    CHECK_THROWS_AS(validate_dataset(collinear_image), Error);

    CalibrationDataset nan_value = good;
    nan_value.observations[0][0].u = NAN;
    CHECK_THROWS_AS(validate_dataset(nan_value), Error);
  }

  TEST_CASE("objective is zero at the ground truth and bit-reproducible") {
    const SynthSpec spec = test::recovery_spec(DistortionModel(3, {-0.1, -0.15}));
    const CalibrationDataset data = generate_synthetic(spec);
    const double j = compute_objective(spec.intrinsics, spec.views, spec.model, data);
    CHECK(j < 1e-18);
    const double j0a = compute_objective(spec.intrinsics, spec.views, DistortionModel(3), data);
    const double j0b = compute_objective(spec.intrinsics, spec.views, DistortionModel(3), data);
    CHECK(j0a > 0.0);
    CHECK(std::memcmp(&j0a, &j0b, sizeof(double)) == 0);
  }

  TEST_CASE("objective errors name the offending view and point") {
    const SynthSpec spec = test::recovery_spec(DistortionModel(0));
    const CalibrationDataset data = generate_synthetic(spec);
    std::vector<Extrinsics> views = spec.views;
    views[1].translation.z() = -views[1].translation.z();
    try {
      compute_objective(spec.intrinsics, views, spec.model, data);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonPositiveDepth);
      CHECK(std::string(e.what()).find("view 2") != std::string::npos);
    }
    std::vector<Extrinsics> short_views(spec.views.begin(), spec.views.end() - 1);
    CHECK_THROWS_AS(compute_objective(spec.intrinsics, short_views, spec.model, data), Error);
  }

  TEST_CASE("expected objective under Gaussian noise is 2 N n sigma^2") {
    SynthSpec spec = test::recovery_spec(DistortionModel(0));
    spec.sigma = 0.3;
    double total = 0.0;
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
      spec.seed = static_cast<std::uint64_t>(s + 1);
      total += compute_objective(spec.intrinsics, spec.views, spec.model, generate_synthetic(spec));
    }
    const double expected = 2.0 * 3.0 * 64.0 * spec.sigma * spec.sigma;
    CHECK(std::abs(total / seeds - expected) < 0.1 * expected);
  }

  TEST_CASE("optimizer options must be positive") {
    OptimizerOptions o;
    CHECK_NOTHROW(o.validate());
    o.step_tolerance = 0.0;
    CHECK_THROWS_AS(o.validate(), Error);
    o = {};
    o.max_function_evaluations = -1;
    CHECK_THROWS_AS(o.validate(), Error);
    CHECK(to_string(Termination::StepTolerance) == "step-tolerance");
    CHECK(to_string(OptimizerMethod::Bfgs) == "bfgs");
  }

  TEST_CASE("refinement from an optimal start stops immediately") {
    const SynthSpec spec = test::recovery_spec(DistortionModel(3, {-0.1, -0.15}));
    const CalibrationDataset data = generate_synthetic(spec);
    for (OptimizerMethod method : {OptimizerMethod::LevenbergMarquardt, OptimizerMethod::Bfgs}) {
      OptimizerOptions opts;
      opts.method = method;
      const CalibrationResult start = make_initial_result(spec.intrinsics, spec.views, spec.model, data);
      const CalibrationResult fit = refine(start, data, opts);
      CHECK(fit.iterations <= 2);
      CHECK(fit.objective <= start.objective + opts.objective_tolerance);
      CHECK(fit.converged);
    }
  }

  TEST_CASE("refinement recovers model-3 ground truth from a linear start") {
    const SynthSpec spec = test::recovery_spec(DistortionModel(3, {-0.1, -0.15}));
    const CalibrationDataset data = generate_synthetic(spec);
    const CalibrationResult fit = calibrate(data, 3);
    CHECK(fit.objective < 1e-6);
    CHECK(std::abs(fit.model.k(0) + 0.1) < 5e-3);
    CHECK(std::abs(fit.model.k(1) + 0.15) < 5e-3);
    CHECK(test::relative_error(fit.intrinsics.alpha(), 830.0) < 0.01);
    CHECK(test::relative_error(fit.intrinsics.beta(), 830.0) < 0.01);
    CHECK(test::relative_error(fit.intrinsics.u0(), 304.0) < 0.01);
    CHECK(test::relative_error(fit.intrinsics.v0(), 207.0) < 0.01);
    for (std::size_t h = 1; h < fit.history.size(); ++h) CHECK(fit.history[h] <= fit.history[h - 1]);
    // The stored objective is the re-evaluated one.
    CHECK(std::abs(fit.objective - compute_objective(fit.intrinsics, fit.extrinsics, fit.model, data)) < 1e-9);
  }

  TEST_CASE("fixed intrinsics are left untouched") {
    const SynthSpec spec = test::recovery_spec(DistortionModel(2, {-0.2}));
    const CalibrationDataset data = generate_synthetic(spec);
    const LinearInitialization init = initialize_linear(data);
    OptimizerOptions opts;
    opts.refine_intrinsics = false;
    const CalibrationResult fit =
        refine(make_initial_result(spec.intrinsics, init.extrinsics, DistortionModel(2), data), data, opts);
    CHECK(fit.intrinsics == spec.intrinsics);
    CHECK(std::abs(fit.model.k(0) + 0.2) < 1e-4);
  }

  TEST_CASE("coefficient embedding into richer profiles preserves the profile") {
    const struct {
      int from, to;
    } pairs[] = {{1, 3}, {1, 6}, {1, 8}, {2, 0}, {2, 3}, {2, 9}, {4, 7}, {4, 8}, {5, 6},
                 {5, 7}, {5, 8}, {5, 9}, {6, 8}, {7, 8}, {4, 9}, {7, 9}};
    std::mt19937_64 rng(5);
    for (const auto& p : pairs) {
      const DistortionModel m = test::draw_model(p.from, rng);
      const DistortionModel e = embed_coefficients(m, p.to);
      CHECK(e.id() == p.to);
      for (double r : {0.05, 0.2, 0.45}) {
        CAPTURE(p.from);
        CAPTURE(p.to);
        CHECK(eval_profile(e, r) == doctest::Approx(eval_profile(m, r)).epsilon(1e-14));
      }
    }
    CHECK(embed_coefficients(DistortionModel(3, {0.1, 0.2}), 3) == DistortionModel(3, {0.1, 0.2}));
    CHECK_THROWS_AS(embed_coefficients(DistortionModel(3, {0.1, 0.2}), 1), Error);
  }

  TEST_CASE("richer models warm-started from simpler ones never do worse") {
    const CalibrationDataset data = generate_synthetic(test::ranking_spec());
    const LinearInitialization init = initialize_linear(data);
    const OptimizerOptions opts;
    const auto fit = [&](const DistortionModel& start, const CalibrationResult* from) {
      const IntrinsicParams& a = from ? from->intrinsics : init.intrinsics;
      const std::vector<Extrinsics>& e = from ? from->extrinsics : init.extrinsics;
      return refine(make_initial_result(a, e, start, data), data, opts);
    };
    const CalibrationResult j2 = fit(DistortionModel(2), nullptr);
    const CalibrationResult j3 = fit(embed_coefficients(j2.model, 3), &j2);
    CHECK(j3.objective <= j2.objective + opts.objective_tolerance);
    const CalibrationResult j5 = fit(DistortionModel(5), nullptr);
    const CalibrationResult j7 = fit(embed_coefficients(j5.model, 7), &j5);
    CHECK(j7.objective <= j5.objective + opts.objective_tolerance);
  }

  TEST_CASE("single-model comparison on noise-free distortion-free data") {
    const CalibrationDataset data = generate_synthetic(test::recovery_spec(DistortionModel(0)));
    const std::vector<int> ids{0};
    const ModelFitReport report = compare_models(data, ids);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].model_id == 0);
    CHECK(report.rows[0].rank == 0);
    CHECK(report.rows[0].objective < 1e-6);
  }

  TEST_CASE("comparison shares one initialization and ranks by objective") {
    const CalibrationDataset data = generate_synthetic(test::recovery_spec(DistortionModel(3, {-0.1, -0.15})));
    const std::vector<int> ids{9, 3, 1, 0};
    CompareOptions serial;
    serial.parallel = false;
    const ModelFitReport a = compare_models(data, ids, {}, serial);
    const ModelFitReport b = compare_models(data, ids);
    REQUIRE(a.rows.size() == 4);
    CHECK(a.rows[0].model_id == 0);
    CHECK(a.rows[3].model_id == 9);
    std::vector<int> ranks;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].initial_objective == a.rows[0].initial_objective);
      // Parallel and serial runs are identical.
      CHECK(a.rows[i].objective == b.rows[i].objective);
      CHECK(a.rows[i].rank == b.rows[i].rank);
      ranks.push_back(a.rows[i].rank);
      for (std::size_t j = 0; j < a.rows.size(); ++j) {
        if (a.rows[i].objective < a.rows[j].objective) CHECK(a.rows[i].rank < a.rows[j].rank);
      }
    }
    std::sort(ranks.begin(), ranks.end());
    CHECK(ranks == std::vector<int>{0, 1, 2, 3});
  }

  TEST_CASE("linear distortion pre-estimate starts closer to the truth") {
    const SynthSpec spec = test::recovery_spec(DistortionModel(3, {-0.1, -0.15}));
    const CalibrationDataset data = generate_synthetic(spec);
    const std::vector<double> k = estimate_distortion_linear(spec.intrinsics, spec.views, 3, data);
    REQUIRE(k.size() == 2);
    CHECK(k[0] == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(k[1] == doctest::Approx(-0.15).epsilon(1e-6));
    CompareOptions copts;
    copts.linear_distortion_init = true;
    const std::vector<int> ids{3};
    const ModelFitReport report = compare_models(data, ids, {}, copts);
    CHECK(report.rows[0].objective < 1e-6);
  }

  TEST_CASE("rank ties go to the lower model id") {
    ModelFitReport report;
    for (int id : {4, 2, 7}) {
      ModelFitRow row;
      row.model_id = id;
      row.objective = id == 2 ? 5.0 : 1.0;
      report.rows.push_back(row);
    }
    assign_ranks(report);
    CHECK(report.rows[0].model_id == 2);
    CHECK(report.rows[0].rank == 2);
    CHECK(report.rows[1].rank == 0);  // model 4
    CHECK(report.rows[2].rank == 1);  // model 7
  }

  TEST_CASE("invalid options and unknown model ids are rejected up front") {
    const CalibrationDataset data = generate_synthetic(test::recovery_spec(DistortionModel(0)));
    const std::vector<int> ids{0, 1};
    OptimizerOptions bad;
    bad.max_iterations = 0;
    CHECK_THROWS_AS(compare_models(data, ids, bad), Error);
    CHECK_THROWS_AS(compare_models(data, std::vector<int>{11}), Error);
  }
}
