#include <algorithm>
#include <array>
#include <future>
#include <limits>
#include <numeric>
#include <string>

#include "raddist/calibration.hpp"

namespace raddist {
namespace {

// Target slot -> source coefficient index (-1 for zero).
struct Embedding {
  int from;
  int to;
  std::array<int, 3> slots;
};

constexpr std::array<Embedding, 16> kEmbeddings{{
    {1, 3, {0, -1, -1}},
    {1, 6, {0, -1, -1}},
    {1, 8, {0, -1, -1}},
    {2, 0, {0, -1, -1}},
    {2, 3, {-1, 0, -1}},
    {2, 9, {0, -1, -1}},
    {4, 7, {0, -1, -1}},
    {4, 8, {-1, 0, -1}},
    {5, 6, {-1, 0, -1}},
    {5, 7, {-1, 0, -1}},
    {5, 8, {-1, -1, 0}},
    {5, 9, {-1, -1, 0}},
    {6, 8, {0, -1, 1}},
    {7, 8, {-1, 0, 1}},
    {4, 9, {-1, 0, -1}},
    {7, 9, {-1, 0, 1}},
}};

ModelFitRow failed_row(int model_id, const LinearInitialization& init, const std::string& error) {
  ModelFitRow row;
  row.model_id = model_id;
  row.objective = std::numeric_limits<double>::infinity();
  row.coefficients.assign(coefficient_arity(model_id), 0.0);
  row.alpha = init.intrinsics.alpha();
  row.gamma = init.intrinsics.gamma();
  row.u0 = init.intrinsics.u0();
  row.beta = init.intrinsics.beta();
  row.v0 = init.intrinsics.v0();
  row.initial_objective = std::numeric_limits<double>::quiet_NaN();
  row.error = error;
  return row;
}

ModelFitRow fit_one(const CalibrationDataset& data, const LinearInitialization& init, int model_id,
                    const OptimizerOptions& opts, bool linear_distortion_init) {
  try {
    DistortionModel start(model_id);
    if (linear_distortion_init) {
      start = DistortionModel(model_id, estimate_distortion_linear(init.intrinsics, init.extrinsics, model_id, data));
    }
    const CalibrationResult initial = make_initial_result(init.intrinsics, init.extrinsics, start, data);
    const CalibrationResult fit = refine(initial, data, opts);
    ModelFitRow row;
    row.model_id = model_id;
    row.objective = fit.objective;
    row.coefficients.assign(fit.model.coefficients().begin(), fit.model.coefficients().end());
    row.alpha = fit.intrinsics.alpha();
    row.gamma = fit.intrinsics.gamma();
    row.u0 = fit.intrinsics.u0();
    row.beta = fit.intrinsics.beta();
    row.v0 = fit.intrinsics.v0();
    row.initial_objective = initial.objective;
    row.iterations = fit.iterations;
    row.converged = fit.converged;
    row.termination = fit.termination;
    return row;
  } catch (const Error& e) {
    return failed_row(model_id, init, e.what());
  }
}

}  // namespace

DistortionModel embed_coefficients(const DistortionModel& model, int target_id) {
  if (model.id() == target_id) return model;
  coefficient_arity(target_id);
  for (const Embedding& e : kEmbeddings) {
    if (e.from != model.id() || e.to != target_id) continue;
    std::array<double, 3> k{};
    for (std::size_t s = 0; s < 3; ++s) {
      if (e.slots[s] >= 0) k[s] = model.k(static_cast<std::size_t>(e.slots[s]));
    }
    return DistortionModel(target_id, std::span<const double>(k.data(), coefficient_arity(target_id)));
  }
  throw Error(ErrorKind::InvalidArgument,
              "model " + std::to_string(target_id) + " does not contain model " + std::to_string(model.id()));
}

void assign_ranks(ModelFitReport& report) {
  auto& rows = report.rows;
  std::sort(rows.begin(), rows.end(), [](const ModelFitRow& a, const ModelFitRow& b) { return a.model_id < b.model_id; });
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].objective < rows[b].objective; });
  for (std::size_t r = 0; r < order.size(); ++r) rows[order[r]].rank = static_cast<int>(r);
}

ModelFitReport compare_models(const CalibrationDataset& data, const LinearInitialization& init,
                              std::span<const int> model_ids, const OptimizerOptions& opts,
                              const CompareOptions& compare) {
  opts.validate();
  for (int id : model_ids) coefficient_arity(id);

  ModelFitReport report;
  if (compare.parallel && model_ids.size() > 1) {
    std::vector<std::future<ModelFitRow>> jobs;
    jobs.reserve(model_ids.size());
    for (int id : model_ids) {
      jobs.push_back(std::async(std::launch::async, fit_one, std::cref(data), std::cref(init), id, opts,
                                compare.linear_distortion_init));
    }
    for (auto& job : jobs) report.rows.push_back(job.get());
  } else {
    for (int id : model_ids) report.rows.push_back(fit_one(data, init, id, opts, compare.linear_distortion_init));
  }
  assign_ranks(report);
  return report;
}

ModelFitReport compare_models(const CalibrationDataset& data, std::span<const int> model_ids,
                              const OptimizerOptions& opts, const CompareOptions& compare) {
  const LinearInitialization init = initialize_linear(data);
  return compare_models(data, init, model_ids, opts, compare);
}

CalibrationResult calibrate(const CalibrationDataset& data, int model_id, const OptimizerOptions& opts,
                            bool linear_distortion_init) {
  const LinearInitialization init = initialize_linear(data);
  DistortionModel start(model_id);
  if (linear_distortion_init) {
    start = DistortionModel(model_id, estimate_distortion_linear(init.intrinsics, init.extrinsics, model_id, data));
  }
  return refine(make_initial_result(init.intrinsics, init.extrinsics, start, data), data, opts);
}

}  // namespace raddist
