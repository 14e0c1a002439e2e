#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "raddist/io.hpp"

namespace raddist {
namespace {

std::string fixed4(double value) {
  if (std::isinf(value)) return value > 0.0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

}  // namespace

std::string render_report(const ModelFitReport& report) {
  std::string out = "model\tJ\trank\tk1\tk2\tk3\talpha\tgamma\tu0\tbeta\tv0\n";
  std::vector<const ModelFitRow*> rows;
  for (const ModelFitRow& row : report.rows) rows.push_back(&row);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ModelFitRow* a, const ModelFitRow* b) { return a->model_id < b->model_id; });
  for (const ModelFitRow* row : rows) {
    out += std::to_string(row->model_id) + '\t' + fixed4(row->objective) + '\t' + std::to_string(row->rank);
    for (std::size_t i = 0; i < 3; ++i) {
      out += '\t';
      if (i < row->coefficients.size()) out += fixed4(row->coefficients[i]);
    }
    for (double v : {row->alpha, row->gamma, row->u0, row->beta, row->v0}) out += '\t' + fixed4(v);
    out += '\n';
  }
  return out;
}

ModelFitReport report_from_reference(const ReferenceTable& table) {
  ModelFitReport report;
  for (const ReferenceFit& fit : table.fits) {
    ModelFitRow row;
    row.model_id = fit.model_id;
    row.objective = fit.objective;
    row.rank = fit.rank;
    row.coefficients = fit.coefficients;
    row.alpha = fit.alpha;
    row.gamma = fit.gamma;
    row.u0 = fit.u0;
    row.beta = fit.beta;
    row.v0 = fit.v0;
    row.initial_objective = fit.objective;
    row.converged = true;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace raddist
