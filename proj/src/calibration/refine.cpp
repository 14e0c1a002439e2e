#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "raddist/calibration.hpp"
#include "residuals.hpp"

namespace raddist {
namespace {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();
constexpr double kRelativeStep = 1e-6;

// Parameter vector: [alpha gamma u0 beta v0]? [rx ry rz tx ty tz] x N, k...
class Problem {
 public:
  Problem(const CalibrationResult& initial, const CalibrationDataset& data, bool free_intrinsics)
      : initial_(initial),
        data_(data),
        free_intrinsics_(free_intrinsics),
        offset_(free_intrinsics ? 5 : 0),
        residual_count_(2 * data.view_count() * data.point_count()) {}

  Eigen::Index size() const {
    return static_cast<Eigen::Index>(offset_ + 6 * initial_.extrinsics.size() + initial_.model.arity());
  }
  Eigen::Index residual_count() const { return static_cast<Eigen::Index>(residual_count_); }
  int evaluations() const { return evaluations_; }

  Eigen::VectorXd pack() const {
    Eigen::VectorXd x(size());
    const IntrinsicParams& a = initial_.intrinsics;
    if (free_intrinsics_) x.head<5>() << a.alpha(), a.gamma(), a.u0(), a.beta(), a.v0();
    Eigen::Index o = static_cast<Eigen::Index>(offset_);
    for (const Extrinsics& e : initial_.extrinsics) {
      x.segment<3>(o) = e.rotation;
      x.segment<3>(o + 3) = e.translation;
      o += 6;
    }
    for (double k : initial_.model.coefficients()) x(o++) = k;
    return x;
  }

  // Throws InvalidArgument for parameter vectors outside the model's domain.
  CalibrationResult unpack(const Eigen::VectorXd& x) const {
    CalibrationResult out = initial_;
    if (free_intrinsics_) out.intrinsics = IntrinsicParams(x(0), x(3), x(1), x(2), x(4));
    Eigen::Index o = static_cast<Eigen::Index>(offset_);
    for (Extrinsics& e : out.extrinsics) {
      e.rotation = x.segment<3>(o);
      e.translation = x.segment<3>(o + 3);
      o += 6;
    }
    out.model = initial_.model.with_coefficients(std::span<const double>(x.data() + o, initial_.model.arity()));
    return out;
  }

  // False when the parameters are infeasible (singular profile, point behind
  // the camera, invalid intrinsics).
  bool residuals(const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    ++evaluations_;
    if (!x.allFinite()) return false;
    r.resize(residual_count());
    try {
      const CalibrationResult s = unpack(x);
      const auto failure = detail::evaluate_residuals(s.intrinsics, s.extrinsics, s.model, data_,
                                                      std::span<double>(r.data(), residual_count_), ws_);
      return failure.status == detail::ResidualStatus::Ok;
    } catch (const Error&) {
      return false;
    }
  }

  double objective(const Eigen::VectorXd& x) {
    Eigen::VectorXd r;
    if (!residuals(x, r)) return kInfeasible;
    return detail::sum_of_squares(std::span<const double>(r.data(), residual_count_));
  }

  static double step_for(double v) { return kRelativeStep * std::max(std::abs(v), 1.0); }

  // Central differences; falls back to a one-sided difference next to an
  // infeasible region. Returns false when neither side is feasible.
  bool jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& r0, Eigen::MatrixXd& jac) {
    jac.resize(residual_count(), size());
    Eigen::VectorXd xp = x;
    Eigen::VectorXd rp;
    Eigen::VectorXd rm;
    for (Eigen::Index c = 0; c < size(); ++c) {
      const double h = step_for(x(c));
      xp(c) = x(c) + h;
      const bool okp = residuals(xp, rp);
      xp(c) = x(c) - h;
      const bool okm = residuals(xp, rm);
      xp(c) = x(c);
      if (okp && okm) {
        jac.col(c) = (rp - rm) / (2.0 * h);
      } else if (okp) {
        jac.col(c) = (rp - r0) / h;
      } else if (okm) {
        jac.col(c) = (r0 - rm) / h;
      } else {
        return false;
      }
    }
    return true;
  }

  bool gradient(const Eigen::VectorXd& x, double f0, Eigen::VectorXd& g) {
    g.resize(size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index c = 0; c < size(); ++c) {
      const double h = step_for(x(c));
      xp(c) = x(c) + h;
      const double fp = objective(xp);
      xp(c) = x(c) - h;
      const double fm = objective(xp);
      xp(c) = x(c);
      if (std::isfinite(fp) && std::isfinite(fm)) {
        g(c) = (fp - fm) / (2.0 * h);
      } else if (std::isfinite(fp)) {
        g(c) = (fp - f0) / h;
      } else if (std::isfinite(fm)) {
        g(c) = (f0 - fm) / h;
      } else {
        return false;
      }
    }
    return true;
  }

 private:
  const CalibrationResult& initial_;
  const CalibrationDataset& data_;
  bool free_intrinsics_;
  std::size_t offset_;
  std::size_t residual_count_;
  int evaluations_ = 0;
  detail::ResidualWorkspace ws_;
};

bool step_is_small(const Eigen::VectorXd& step, const Eigen::VectorXd& x, double tol) {
  for (Eigen::Index i = 0; i < step.size(); ++i) {
    if (std::abs(step(i)) > tol * std::max(std::abs(x(i)), 1.0)) return false;
  }
  return true;
}

struct Outcome {
  Eigen::VectorXd x;
  double objective;
  int iterations = 0;
  Termination termination = Termination::NotStarted;
  std::vector<double> history;
};

bool is_converged(Termination t) {
  return t == Termination::ObjectiveTolerance || t == Termination::StepTolerance || t == Termination::ZeroObjective;
}

// Levenberg-Marquardt with Marquardt's diagonal scaling and Nielsen's damping
// update.
Outcome levenberg_marquardt(Problem& problem, const OptimizerOptions& opts) {
  Outcome out;
  out.x = problem.pack();
  Eigen::VectorXd r;
  problem.residuals(out.x, r);
  out.objective = detail::sum_of_squares(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())));
  out.history.push_back(out.objective);

  const Eigen::Index np = problem.size();
  double mu = -1.0;
  double nu = 2.0;
  Eigen::MatrixXd jac;
  Eigen::VectorXd r_new;
  while (out.termination == Termination::NotStarted) {
    if (out.objective == 0.0) {
      out.termination = Termination::ZeroObjective;
      break;
    }
    if (out.iterations >= opts.max_iterations) {
      out.termination = Termination::MaxIterations;
      break;
    }
    if (problem.evaluations() + 2 * np > opts.max_function_evaluations) {
      out.termination = Termination::MaxFunctionEvaluations;
      break;
    }
    if (!problem.jacobian(out.x, r, jac)) {
      out.termination = Termination::LineSearchFailure;
      break;
    }
    const Eigen::MatrixXd h = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    Eigen::VectorXd d = h.diagonal();
    const double dmax = d.maxCoeff();
    for (Eigen::Index i = 0; i < np; ++i) d(i) = std::max(d(i), 1e-12 * dmax);
    if (mu < 0.0) mu = 1e-3;

    while (true) {
      Eigen::MatrixXd damped = h;
      damped.diagonal() += mu * d;
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      if (!step.allFinite()) {
        out.termination = Termination::LineSearchFailure;
        break;
      }
      if (step_is_small(step, out.x, opts.step_tolerance)) {
        out.termination = Termination::StepTolerance;
        break;
      }
      if (problem.evaluations() >= opts.max_function_evaluations) {
        out.termination = Termination::MaxFunctionEvaluations;
        break;
      }
      const Eigen::VectorXd x_new = out.x + step;
      double f_new = kInfeasible;
      if (problem.residuals(x_new, r_new)) {
        f_new = detail::sum_of_squares(std::span<const double>(r_new.data(), static_cast<std::size_t>(r_new.size())));
      }
      if (f_new < out.objective) {
        const double predicted = -(2.0 * step.dot(g) + step.dot(h * step));
        const double actual = out.objective - f_new;
        const double rho = predicted > 0.0 ? actual / predicted : 0.0;
        mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
        nu = 2.0;
        ++out.iterations;
        out.history.push_back(f_new);
        const bool flat = actual <= opts.objective_tolerance * out.objective &&
                          predicted <= opts.objective_tolerance * out.objective;
        out.x = x_new;
        r = r_new;
        out.objective = f_new;
        if (flat) out.termination = Termination::ObjectiveTolerance;
        break;
      }
      mu *= nu;
      nu *= 2.0;
      if (!(mu < 1e40)) {
        out.termination = Termination::LineSearchFailure;
        break;
      }
    }
  }
  return out;
}

// Quasi-Newton (BFGS inverse-Hessian update) on variables scaled by their
// initial magnitudes, with a backtracking Armijo line search.
Outcome bfgs(Problem& problem, const OptimizerOptions& opts) {
  Outcome out;
  const Eigen::VectorXd x0 = problem.pack();
  const Eigen::Index np = problem.size();
  Eigen::VectorXd scale(np);
  for (Eigen::Index i = 0; i < np; ++i) scale(i) = std::max(std::abs(x0(i)), 1.0);

  out.x = x0;
  out.objective = problem.objective(out.x);
  out.history.push_back(out.objective);

  Eigen::VectorXd gx;
  if (!problem.gradient(out.x, out.objective, gx)) {
    out.termination = Termination::LineSearchFailure;
    return out;
  }
  Eigen::VectorXd g = gx.cwiseProduct(scale);  // gradient in scaled variables
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(np, np);
  bool first = true;

  while (out.termination == Termination::NotStarted) {
    if (out.objective == 0.0) {
      out.termination = Termination::ZeroObjective;
      break;
    }
    if (out.iterations >= opts.max_iterations) {
      out.termination = Termination::MaxIterations;
      break;
    }
    Eigen::VectorXd dir = -hinv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -g;
      slope = g.dot(dir);
    }
    if (slope == 0.0) {
      out.termination = Termination::StepTolerance;
      break;
    }
    double step = first ? std::min(1.0, 1.0 / std::max(g.lpNorm<Eigen::Infinity>(), 1e-300)) : 1.0;

    // Backtracking with quadratic interpolation.
    double f_new = kInfeasible;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int trial = 0; trial < 60; ++trial) {
      if (problem.evaluations() >= opts.max_function_evaluations) break;
      const Eigen::VectorXd dz = step * dir;
      if (step_is_small(dz.cwiseProduct(scale), out.x, opts.step_tolerance) && trial > 0) break;
      x_new = out.x + dz.cwiseProduct(scale);
      f_new = problem.objective(x_new);
      if (f_new <= out.objective + 1e-4 * step * slope && f_new < out.objective) {
        accepted = true;
        break;
      }
      double next = 0.5 * step;
      if (std::isfinite(f_new)) {
        const double denom = 2.0 * (f_new - out.objective - step * slope);
        if (denom > 0.0) next = std::clamp(-slope * step * step / denom, 0.1 * step, 0.5 * step);
      }
      step = next;
    }
    if (!accepted) {
      if (problem.evaluations() >= opts.max_function_evaluations) {
        out.termination = Termination::MaxFunctionEvaluations;
      } else if (step_is_small((step * dir).cwiseProduct(scale), out.x, opts.step_tolerance)) {
        out.termination = Termination::StepTolerance;
      } else {
        out.termination = Termination::LineSearchFailure;
      }
      break;
    }

    const Eigen::VectorXd dx = x_new - out.x;
    const double f_old = out.objective;
    out.x = x_new;
    out.objective = f_new;
    ++out.iterations;
    out.history.push_back(f_new);

    if (problem.evaluations() + 2 * np > opts.max_function_evaluations) {
      out.termination = Termination::MaxFunctionEvaluations;
      break;
    }
    if (!problem.gradient(out.x, out.objective, gx)) {
      out.termination = Termination::LineSearchFailure;
      break;
    }
    const Eigen::VectorXd g_new = gx.cwiseProduct(scale);
    const Eigen::VectorXd s = dx.cwiseQuotient(scale);
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (first) hinv *= sy / y.squaredNorm();
      const Eigen::VectorXd hy = hinv * y;
      const double rho = 1.0 / sy;
      hinv += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
      first = false;
    }
    g = g_new;

    if (f_old - f_new <= opts.objective_tolerance * f_old) {
      out.termination = Termination::ObjectiveTolerance;
    } else if (step_is_small(dx, out.x, opts.step_tolerance)) {
      out.termination = Termination::StepTolerance;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(OptimizerMethod method) noexcept {
  switch (method) {
    case OptimizerMethod::LevenbergMarquardt: return "levenberg-marquardt";
    case OptimizerMethod::Bfgs: return "bfgs";
  }
  return "unknown";
}

std::string_view to_string(Termination termination) noexcept {
  switch (termination) {
    case Termination::NotStarted: return "not-started";
    case Termination::ObjectiveTolerance: return "objective-tolerance";
    case Termination::StepTolerance: return "step-tolerance";
    case Termination::ZeroObjective: return "zero-objective";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::MaxFunctionEvaluations: return "max-function-evaluations";
    case Termination::LineSearchFailure: return "line-search-failure";
  }
  return "unknown";
}

void OptimizerOptions::validate() const {
  if (!(step_tolerance > 0.0) || !(objective_tolerance > 0.0) || max_iterations <= 0 ||
      max_function_evaluations <= 0) {
    throw Error(ErrorKind::InvalidArgument, "optimizer tolerances and limits must be positive");
  }
}

CalibrationResult make_initial_result(const IntrinsicParams& a, std::vector<Extrinsics> extrinsics,
                                      const DistortionModel& model, const CalibrationDataset& data) {
  const double j = compute_objective(a, extrinsics, model, data);
  CalibrationResult out{a, std::move(extrinsics), model, j, 0, 0, false, Termination::NotStarted, {j}};
  return out;
}

CalibrationResult refine(const CalibrationResult& initial, const CalibrationDataset& data,
                         const OptimizerOptions& opts) {
  opts.validate();
  // Establishes feasibility of the start and throws with the offending point
  // otherwise.
  const double start = compute_objective(initial.intrinsics, initial.extrinsics, initial.model, data);

  Problem problem(initial, data, opts.refine_intrinsics);
  Outcome outcome = opts.method == OptimizerMethod::Bfgs ? bfgs(problem, opts) : levenberg_marquardt(problem, opts);

  CalibrationResult out = problem.unpack(outcome.x);
  out.objective = compute_objective(out.intrinsics, out.extrinsics, out.model, data);
  if (!(out.objective <= start)) {
    // Never hand back something worse than the input.
    out = initial;
    out.objective = start;
    outcome.history = {start};
  }
  out.iterations = outcome.iterations;
  out.function_evaluations = problem.evaluations();
  out.termination = outcome.termination;
  out.converged = is_converged(outcome.termination);
  out.history = std::move(outcome.history);
  return out;
}

}  // namespace raddist
