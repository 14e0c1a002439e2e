// Acceptance runner: evaluates criteria 1-8 and prints one PASS/FAIL line per
// criterion. Exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "invariants.hpp"
#include "raddist/calibration.hpp"
#include "raddist/io.hpp"
#include "raddist/reference_sets.hpp"
#include "raddist/undistortion.hpp"
#include "support.hpp"

using namespace raddist;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Round trip on every published coefficient row, 10,000 points per row.
Verdict round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  double worst = 0.0;
  int failures = 0;
  for (int id = 1; id <= 9; ++id) {
    for (const auto& k : reference_coefficients(id)) {
      const DistortionModel m(id, k);
      for (int i = 0; i < 10000; ++i) {
        const NormalizedPoint p = test::draw_point(rng, 0.5);
        try {
          const NormalizedPoint q = undistort_normalized(m, distort_normalized(m, p));
          worst = std::max({worst, std::abs(q.x - p.x), std::abs(q.y - p.y)});
        } catch (const Error&) {
          ++failures;
        }
      }
    }
  }
  const double t = seconds_since(t0);
  return {failures == 0 && worst < 1e-9 && t < 10.0,
          "max error " + fmt("%.2e", worst) + ", " + std::to_string(failures) + " failures, " + fmt("%.2f", t) + " s"};
}

// 2. Closed-form cubic against the companion-matrix solver.
Verdict cubic() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> mag(std::log(0.01), std::log(10.0));
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::bernoulli_distribution neg(0.5);
  double worst_match = 0.0;
  double worst_residual = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const CubicProblem prob{coef(rng), coef(rng), (neg(rng) ? -1.0 : 1.0) * std::exp(mag(rng))};
    const RootSet rs = solve_cubic_paper(prob);
    auto oracle = test::companion_roots({-prob.y, 1.0, prob.p, prob.q});
    for (const auto& x : rs.roots) {
      auto best = std::min_element(oracle.begin(), oracle.end(),
                                   [&](auto a, auto b) { return std::abs(a - x) < std::abs(b - x); });
      worst_match = std::max(worst_match, std::abs(*best - x));
      oracle.erase(best);
      worst_residual = std::max(worst_residual, std::abs(x + prob.p * x * x + prob.q * x * x * x - prob.y));
    }
  }
  return {worst_match < 1e-8 && worst_residual < 1e-8,
          "max root distance " + fmt("%.2e", worst_match) + ", max residual " + fmt("%.2e", worst_residual)};
}

// 3. Analytic versus numeric inversion, and the model-0 numeric round trip.
Verdict analytic_vs_numeric() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const DistortionModel m = test::draw_model(test::random_model_id(rng, 1, 9), rng);
    const NormalizedPoint pd = distort_normalized(m, test::draw_point(rng, 0.5));
    try {
      const NormalizedPoint a = undistort_normalized(m, pd);
      const NormalizedPoint b = undistort_numeric(m, pd);
      worst = std::max({worst, std::abs(a.x - b.x), std::abs(a.y - b.y)});
      ++compared;
    } catch (const Error&) {
    }
  }
  double worst0 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const DistortionModel m = test::draw_model(0, rng);
    const NormalizedPoint p = test::draw_point(rng, 0.5);
    const NormalizedPoint q = undistort_numeric(m, distort_normalized(m, p));
    worst0 = std::max({worst0, std::abs(q.x - p.x), std::abs(q.y - p.y)});
  }
  return {compared > 0 && worst < 1e-9 && worst0 < 1e-10,
          std::to_string(compared) + " compared, max disagreement " + fmt("%.2e", worst) + ", model-0 round trip " +
              fmt("%.2e", worst0)};
}

// 4. Ground-truth recovery with the default tolerances.
Verdict recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const SynthSpec spec = test::recovery_spec(DistortionModel(3, {-0.1, -0.15}));
  const CalibrationDataset data = generate_synthetic(spec);
  const CalibrationResult fit = calibrate(data, 3);
  const double t = seconds_since(t0);
  const IntrinsicParams& a = fit.intrinsics;
  const double intr = std::max({test::relative_error(a.alpha(), 830.0), test::relative_error(a.beta(), 830.0),
                                test::relative_error(a.u0(), 304.0), test::relative_error(a.v0(), 207.0)});
  const double kerr = std::max(std::abs(fit.model.k(0) + 0.1), std::abs(fit.model.k(1) + 0.15));
  return {intr < 0.01 && kerr < 5e-3 && fit.objective < 1e-6 && t < 60.0,
          "intrinsics rel " + fmt("%.2e", intr) + ", k abs " + fmt("%.2e", kerr) + ", J " + fmt("%.2e", fit.objective) +
              ", " + std::to_string(fit.iterations) + " iterations, " + fmt("%.2f", t) + " s"};
}

ModelFitReport ranking_report() {
  const CalibrationDataset data = generate_synthetic(test::ranking_spec());
  const std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8, 9};
  return compare_models(data, ids);
}

double objective_of(const ModelFitReport& r, int id) {
  for (const ModelFitRow& row : r.rows) {
    if (row.model_id == id) return row.objective;
  }
  return NAN;
}

// 5. Models 7, 8 and 9 beat every model in 1-6.
Verdict ranking(const ModelFitReport& r) {
  double best_simple = INFINITY;
  for (int id = 1; id <= 6; ++id) best_simple = std::min(best_simple, objective_of(r, id));
  const double worst_rich = std::max({objective_of(r, 7), objective_of(r, 8), objective_of(r, 9)});
  return {worst_rich < best_simple,
          "max J(7,8,9) " + fmt("%.4f", worst_rich) + " < min J(1..6) " + fmt("%.4f", best_simple)};
}

// 6. More complex models within a family do at least as well.
Verdict complexity(const ModelFitReport& r) {
  const double tol = OptimizerOptions{}.objective_tolerance;
  const double j1 = objective_of(r, 1), j3 = objective_of(r, 3), j5 = objective_of(r, 5), j7 = objective_of(r, 7),
               j8 = objective_of(r, 8);
  return {j3 <= j1 && j7 <= j5 && j8 <= j7 + tol,
          "J3 " + fmt("%.4f", j3) + " <= J1 " + fmt("%.4f", j1) + ", J7 " + fmt("%.4f", j7) + " <= J5 " +
              fmt("%.4f", j5) + ", J8 " + fmt("%.4f", j8) + " <= J7 + tol"};
}

// 7. Rendering the stored Microsoft fixture matches the golden file.
Verdict report_fidelity() {
  std::ifstream in(std::string(RADDIST_TEST_DIR) + "/golden/microsoft_report.tsv", std::ios::binary);
  std::ostringstream golden;
  golden << in.rdbuf();
  const std::string text = render_report(report_from_reference(reference_tables()[0]));
  const bool has_cells = text.find("\t144.8802\t") != std::string::npos && text.find("\t-0.2286\t") != std::string::npos &&
                         text.find("\t832.4860\t") != std::string::npos &&
                         text.find("\n9\t144.8257\t0\t") != std::string::npos;
  return {in.good() && text == golden.str() && has_cells, std::to_string(text.size()) + " bytes, 10 rows"};
}

// 8. Invariant suites, 500 cases each.
Verdict invariants() {
  const std::vector<test::InvariantOutcome> outcomes{
      test::check_odd_symmetry(801, 500),        test::check_radial_symmetry(802, 500),
      test::check_collinearity(803, 500),        test::check_unit_at_origin(804, 500),
      test::check_frame_paths(805, 500),         test::check_normalize_inverse(806, 500),
      test::check_refine_monotone(807, 500),     test::check_shared_initialization(808, 500),
  };
  bool ok = true;
  std::string detail;
  for (const auto& o : outcomes) {
    ok = ok && o.passed() && o.cases >= 500;
    if (!detail.empty()) detail += "; ";
    detail += o.name + " " + std::to_string(o.cases - o.failures) + "/" + std::to_string(o.cases);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](int n, const char* name, const std::function<Verdict()>& fn) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("criterion %d (%s): %s - %s\n", n, name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "round-trip inversion", round_trip);
  report(2, "closed-form cubic", cubic);
  report(3, "analytic vs numeric inversion", analytic_vs_numeric);
  report(4, "ground-truth recovery", recovery);
  ModelFitReport ranked;
  try {
    ranked = ranking_report();
  } catch (const std::exception& e) {
    std::printf("ranking dataset failed: %s\n", e.what());
  }
  report(5, "ranking trend", [&] { return ranking(ranked); });
  report(6, "complexity trend", [&] { return complexity(ranked); });
  report(7, "report fidelity", report_fidelity);
  report(8, "invariant suites", invariants);

  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
