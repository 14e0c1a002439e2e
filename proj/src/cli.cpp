#include "raddist/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raddist/calibration.hpp"
#include "raddist/io.hpp"
#include "raddist/reference_sets.hpp"
#include "raddist/undistortion.hpp"

namespace raddist {
namespace {

/// Malformed flag values detected after CLI11 has parsed the command line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  double tol_x = 1e-5;
  double tol_fun = 1e-5;
  int max_iter = 120;
  int max_fevals = 8000;
  std::string method = "lm";

  OptimizerOptions optimizer() const {
    OptimizerOptions o;
    o.step_tolerance = tol_x;
    o.objective_tolerance = tol_fun;
    o.max_iterations = max_iter;
    o.max_function_evaluations = max_fevals;
    o.method = method == "bfgs" ? OptimizerMethod::Bfgs : OptimizerMethod::LevenbergMarquardt;
    try {
      o.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return o;
  }
};

std::vector<int> model_list_flag(const std::string& text) {
  try {
    return parse_model_list(text);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

DistortionModel model_flag(int id, const std::string& coeffs) {
  try {
    if (coeffs.empty()) return DistortionModel(id);
    const std::vector<double> k = parse_number_list(coeffs);
    if (k.size() != coefficient_arity(id)) {
      throw UsageError("model " + std::to_string(id) + " takes " + std::to_string(coefficient_arity(id)) +
                       " coefficients, got " + std::to_string(k.size()));
    }
    return DistortionModel(id, k);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

ModelFitRow row_from_result(const CalibrationResult& r) {
  ModelFitRow row;
  row.model_id = r.model.id();
  row.objective = r.objective;
  row.coefficients.assign(r.model.coefficients().begin(), r.model.coefficients().end());
  row.alpha = r.intrinsics.alpha();
  row.gamma = r.intrinsics.gamma();
  row.u0 = r.intrinsics.u0();
  row.beta = r.intrinsics.beta();
  row.v0 = r.intrinsics.v0();
  row.iterations = r.iterations;
  row.converged = r.converged;
  row.termination = r.termination;
  return row;
}

void note_termination(std::ostream& err, int model_id, const CalibrationResult& r) {
  err << "model " << model_id << ": " << r.iterations << " iterations, " << r.function_evaluations
      << " evaluations, " << to_string(r.termination) << (r.converged ? "" : " (not converged)") << '\n';
}

std::vector<Extrinsics> extrinsics_for(const IntrinsicParams& a, const CalibrationDataset& data) {
  PlanePoint centroid;
  for (const PlanePoint& p : data.model_points) {
    centroid.x += p.x / static_cast<double>(data.point_count());
    centroid.y += p.y / static_cast<double>(data.point_count());
  }
  std::vector<Extrinsics> exts;
  for (const auto& obs : data.observations) {
    exts.push_back(estimate_extrinsics(a, estimate_homography(data.model_points, obs), centroid));
  }
  return exts;
}

}  // namespace

int cli_dispatch(std::span<const std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial lens distortion models: calibration, comparison and undistortion", "raddist"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--tol-x", global.tol_x, "Step tolerance of the refinement")->capture_default_str();
  app.add_option("--tol-fun", global.tol_fun, "Objective tolerance of the refinement")->capture_default_str();
  app.add_option("--max-iter", global.max_iter, "Iteration cap of the refinement")->capture_default_str();
  app.add_option("--max-fevals", global.max_fevals, "Objective-evaluation cap of the refinement")
      ->capture_default_str();
  app.add_option("--method", global.method, "Refinement method")
      ->check(CLI::IsMember({"lm", "bfgs"}))
      ->capture_default_str();

  // calibrate
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate one model and print its report row");
  std::string cal_data;
  int cal_model = 0;
  bool cal_linear_k = false;
  std::string cal_intrinsics_out;
  calibrate_cmd->add_option("--data", cal_data, "Dataset directory")->required();
  calibrate_cmd->add_option("--model", cal_model, "Model id")->check(CLI::Range(0, 9))->capture_default_str();
  calibrate_cmd->add_flag("--linear-k-init", cal_linear_k, "Start from a linear coefficient estimate");
  calibrate_cmd->add_option("--intrinsics-out", cal_intrinsics_out, "Write the fitted intrinsics to this file");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Fit several models and print the ranked report");
  std::string cmp_data;
  std::string cmp_models = "0-9";
  bool cmp_linear_k = false;
  bool cmp_serial = false;
  compare_cmd->add_option("--data", cmp_data, "Dataset directory")->required();
  compare_cmd->add_option("--models", cmp_models, "Model ids, e.g. 0-9 or 0,3,8")->capture_default_str();
  compare_cmd->add_flag("--linear-k-init", cmp_linear_k, "Start from linear coefficient estimates");
  compare_cmd->add_flag("--serial", cmp_serial, "Fit the models one after another");

  // fit-distortion
  auto* fit_cmd = app.add_subcommand("fit-distortion", "Fit distortion and poses with known intrinsics");
  std::string fit_data;
  std::string fit_intrinsics;
  int fit_model = 0;
  fit_cmd->add_option("--data", fit_data, "Dataset directory")->required();
  fit_cmd->add_option("--intrinsics", fit_intrinsics, "Intrinsics file (alpha gamma u0 beta v0)")->required();
  fit_cmd->add_option("--model", fit_model, "Model id")->check(CLI::Range(0, 9))->capture_default_str();

  // undistort-points
  auto* undist_cmd = app.add_subcommand("undistort-points", "Undistort pixel points read from standard input");
  int und_model = 0;
  std::string und_coeffs;
  std::string und_intrinsics;
  bool und_numeric = false;
  undist_cmd->add_option("--model", und_model, "Model id")->check(CLI::Range(0, 9))->required();
  undist_cmd->add_option("--coeffs", und_coeffs, "Comma-separated coefficients")->required();
  undist_cmd->add_option("--intrinsics", und_intrinsics, "Intrinsics file (alpha gamma u0 beta v0)")->required();
  undist_cmd->add_flag("--numeric", und_numeric, "Use the bracketed numeric inverse for every model");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset and its ground truth");
  std::string syn_out;
  int syn_model = 0;
  std::string syn_coeffs;
  std::string syn_intrinsics = "830,0.2,304,830,207";
  std::size_t syn_views = 3;
  int syn_grid = 8;
  double syn_pitch = 0.03;
  double syn_distance = 0.55;
  double syn_tilt = 0.4;
  double syn_sigma = 0.0;
  std::uint64_t syn_seed = 1;
  synth_cmd->add_option("--out", syn_out, "Output directory")->required();
  synth_cmd->add_option("--model", syn_model, "Model id")->check(CLI::Range(0, 9))->capture_default_str();
  synth_cmd->add_option("--coeffs", syn_coeffs, "Comma-separated coefficients (default all zero)");
  synth_cmd->add_option("--intrinsics", syn_intrinsics, "alpha,gamma,u0,beta,v0")->capture_default_str();
  synth_cmd->add_option("--views", syn_views, "Number of views")->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--grid", syn_grid, "Points per grid side")->check(CLI::Range(2, 1000))->capture_default_str();
  synth_cmd->add_option("--pitch", syn_pitch, "Grid pitch")->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--distance", syn_distance, "Camera distance")->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--tilt", syn_tilt, "Plane tilt in radians")->capture_default_str();
  synth_cmd->add_option("--sigma", syn_sigma, "Pixel noise standard deviation")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd->add_option("--seed", syn_seed, "Noise seed")->capture_default_str();

  // roundtrip-check
  auto* rt_cmd = app.add_subcommand("roundtrip-check", "Distort then undistort random points with reference coefficients");
  std::string rt_models = "1-9";
  std::size_t rt_samples = 10000;
  double rt_radius = 0.5;
  double rt_tolerance = 1e-9;
  std::uint64_t rt_seed = 1;
  rt_cmd->add_option("--models", rt_models, "Model ids")->capture_default_str();
  rt_cmd->add_option("--samples", rt_samples, "Points per coefficient set")->check(CLI::PositiveNumber)->capture_default_str();
  rt_cmd->add_option("--radius", rt_radius, "Largest undistorted radius")->check(CLI::PositiveNumber)->capture_default_str();
  rt_cmd->add_option("--tolerance", rt_tolerance, "Largest acceptable error")->check(CLI::PositiveNumber)->capture_default_str();
  rt_cmd->add_option("--seed", rt_seed, "Sampling seed")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitUsageError;
  }

  std::ostringstream result;
  try {
    const OptimizerOptions opts = global.optimizer();

    if (*calibrate_cmd) {
      const CalibrationDataset data = load_dataset(cal_data);
      const CalibrationResult fit = calibrate(data, cal_model, opts, cal_linear_k);
      note_termination(err, cal_model, fit);
      ModelFitReport report;
      report.rows.push_back(row_from_result(fit));
      assign_ranks(report);
      if (!cal_intrinsics_out.empty()) write_intrinsics(fit.intrinsics, cal_intrinsics_out);
      result << render_report(report);
    } else if (*compare_cmd) {
      const std::vector<int> ids = model_list_flag(cmp_models);
      const CalibrationDataset data = load_dataset(cmp_data);
      CompareOptions copts;
      copts.parallel = !cmp_serial;
      copts.linear_distortion_init = cmp_linear_k;
      const ModelFitReport report = compare_models(data, ids, opts, copts);
      for (const ModelFitRow& row : report.rows) {
        if (!row.error.empty()) err << "model " << row.model_id << " failed: " << row.error << '\n';
      }
      result << render_report(report);
    } else if (*fit_cmd) {
      const CalibrationDataset data = load_dataset(fit_data);
      const IntrinsicParams a = read_intrinsics(fit_intrinsics);
      OptimizerOptions fixed = opts;
      fixed.refine_intrinsics = false;
      const CalibrationResult fit =
          refine(make_initial_result(a, extrinsics_for(a, data), DistortionModel(fit_model), data), data, fixed);
      note_termination(err, fit_model, fit);
      ModelFitReport report;
      report.rows.push_back(row_from_result(fit));
      assign_ranks(report);
      result << render_report(report);
    } else if (*undist_cmd) {
      const DistortionModel model = model_flag(und_model, und_coeffs);
      const IntrinsicParams a = read_intrinsics(und_intrinsics);
      const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
      for (const PointPair& p : parse_point_lines(text, "<stdin>")) {
        const PixelPoint pd{p.a, p.b};
        PixelPoint pu;
        if (und_numeric) {
          pu = denormalize(a, undistort_numeric(model, normalize(a, pd)));
        } else {
          pu = undistort_pixel(a, model, pd);
        }
        result << format_double(pu.u) << ' ' << format_double(pu.v) << '\n';
      }
    } else if (*synth_cmd) {
      const DistortionModel model = model_flag(syn_model, syn_coeffs);
      std::vector<double> a;
      try {
        a = parse_number_list(syn_intrinsics);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      if (a.size() != 5) throw UsageError("--intrinsics takes five values: alpha,gamma,u0,beta,v0");
      SynthSpec spec;
      spec.intrinsics = IntrinsicParams(a[0], a[3], a[1], a[2], a[4]);
      spec.model_points = grid_points(syn_grid, syn_grid, syn_pitch);
      spec.views = default_views(syn_views, syn_distance, syn_tilt);
      spec.model = model;
      spec.sigma = syn_sigma;
      spec.seed = syn_seed;
      const CalibrationDataset data = generate_synthetic(spec);
      write_dataset(data, syn_out);
      std::ofstream gt(std::filesystem::path(syn_out) / "ground_truth.txt", std::ios::binary | std::ios::trunc);
      gt << format_ground_truth(spec);
      if (!gt) throw Error(ErrorKind::IoError, "cannot write ground_truth.txt");
      result << "wrote " << data.view_count() << " views of " << data.point_count() << " points to " << syn_out
             << '\n';
    } else if (*rt_cmd) {
      const std::vector<int> ids = model_list_flag(rt_models);
      std::mt19937_64 rng(rt_seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      bool ok = true;
      result << "model\tsets\tsamples\tmax_error\tstatus\n";
      for (int id : ids) {
        const auto sets = reference_coefficients(id);
        double worst = 0.0;
        for (const auto& k : sets) {
          const DistortionModel model(id, k);
          for (std::size_t s = 0; s < rt_samples; ++s) {
            const double r = rt_radius * std::sqrt(unit(rng));
            const double theta = 2.0 * 3.14159265358979323846 * unit(rng);
            const NormalizedPoint p{r * std::cos(theta), r * std::sin(theta)};
            double e = 0.0;
            try {
              const NormalizedPoint q = undistort_normalized(model, distort_normalized(model, p));
              e = std::hypot(q.x - p.x, q.y - p.y);
            } catch (const Error&) {
              e = std::numeric_limits<double>::infinity();
            }
            if (!(e <= worst)) worst = e;
          }
        }
        const bool pass = worst <= rt_tolerance;
        ok = ok && pass;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", worst);
        result << id << '\t' << sets.size() << '\t' << sets.size() * rt_samples << '\t' << buf << '\t'
               << (pass ? "ok" : "FAIL") << '\n';
      }
      out << result.str();
      return ok ? kExitSuccess : kExitDomainError;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << "Run with --help for more information.\n";
    return kExitUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  out << result.str();
  return kExitSuccess;
}

}  // namespace raddist
