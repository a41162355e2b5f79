#include "qnpg/optimizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qnpg/errors.hpp"
#include "qnpg/lqr_oracle.hpp"
#include "qnpg/tolerances.hpp"

namespace qnpg {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string to_string(Method m) {
  switch (m) {
    case Method::gd: return "gd";
    case Method::ngd: return "ngd";
    case Method::qn: return "qn";
    case Method::qn_reg: return "qn_reg";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "gd") return Method::gd;
  if (text == "ngd") return Method::ngd;
  if (text == "qn") return Method::qn;
  if (text == "qn_reg") return Method::qn_reg;
  throw ConfigError("unknown method '" + std::string(text) + "' (expected gd, ngd, qn, qn_reg)");
}

std::string to_string(CurvatureKind c) {
  return c == CurvatureKind::oracle ? "oracle" : "estimated";
}

CurvatureKind parse_curvature(std::string_view text) {
  if (text == "oracle") return CurvatureKind::oracle;
  if (text == "estimated") return CurvatureKind::estimated;
  throw ConfigError("unknown curvature source '" + std::string(text) +
                    "' (expected oracle or estimated)");
}

std::string to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::completed: return "completed";
    case TraceStatus::converged: return "converged";
    case TraceStatus::diverged: return "diverged";
    case TraceStatus::not_positive_definite: return "not_positive_definite";
  }
  return "unknown";
}

void OptimizerConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("OptimizerConfig: alpha must be positive");
  if (!(beta >= 0.0)) throw ConfigError("OptimizerConfig: beta must be non-negative");
  if (!(lambda_floor > 0.0)) throw ConfigError("OptimizerConfig: lambda_floor must be positive");
  if (max_iters < 0) throw ConfigError("OptimizerConfig: max_iters must be non-negative");
  if (theta0.size() == 0) throw ConfigError("OptimizerConfig: theta0 is empty");
  if (!(grad_tolerance >= 0.0)) {
    throw ConfigError("OptimizerConfig: grad_tolerance must be non-negative");
  }
}

ParamVector qn_step(const ParamVector& theta, const Eigen::VectorXd& grad, const SymMatrix& H,
                    double alpha) {
  return ParamVector(theta.values() - alpha * solve_spd(H, grad));
}

SymMatrix floored_fisher(const SymMatrix& F, double lambda_floor) {
  if (min_eigenvalue(F) < lambda_floor) {
    return F + SymMatrix::identity(F.size()) * lambda_floor;
  }
  return F;
}

ParamVector ngd_step(const ParamVector& theta, const Eigen::VectorXd& grad, const SymMatrix& F,
                     double alpha, double lambda_floor) {
  return ParamVector(theta.values() - alpha * solve_spd(floored_fisher(F, lambda_floor), grad));
}

ParamVector gd_step(const ParamVector& theta, const Eigen::VectorXd& grad, double alpha) {
  if (grad.size() != theta.size()) {
    throw DimensionError("gd_step: gradient length does not match theta");
  }
  return ParamVector(theta.values() - alpha * grad);
}

Regularized regularize(const SymMatrix& H, const SymMatrix& F, double lambda_floor,
                       double beta_min) {
  if (H.size() != F.size()) throw DimensionError("regularize: H and F sizes differ");
  if (!(beta_min >= 0.0)) throw ConfigError("regularize: beta_min must be non-negative");

  if (beta_min == 0.0 && min_eigenvalue(H) >= lambda_floor) return {H, 0.0};

  if (!(min_eigenvalue(F) > tol::kPositiveDefinite)) {
    // Identity shift: min_eigenvalue(H + βI) = min_eigenvalue(H) + β up to rounding.
    double beta = std::max(beta_min, lambda_floor - min_eigenvalue(H));
    SymMatrix shifted = H + SymMatrix::identity(H.size()) * beta;
    for (double gap = lambda_floor - min_eigenvalue(shifted); gap > 0.0;
         gap = lambda_floor - min_eigenvalue(shifted)) {
      beta += std::max(gap, std::abs(beta) * 1e-15);
      shifted = H + SymMatrix::identity(H.size()) * beta;
    }
    return {shifted, beta};
  }

  const auto feasible = [&](double beta) {
    return min_eigenvalue(H + F * beta) >= lambda_floor;
  };
  if (feasible(beta_min)) return {H + F * beta_min, beta_min};

  double lo = beta_min;
  double hi = std::max(1.0, 2.0 * beta_min);
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("regularize: no finite beta reaches the floor");
  }
  while (hi - lo > tol::kBetaBisection) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {H + F * hi, hi};
}

CurvatureSource lqr_oracle_source(const LqrConfig& cfg) {
  cfg.validate();
  return [cfg](const ParamVector& theta, int) {
    if (theta.size() != 1) throw DimensionError("LQR oracle: theta must be scalar");
    const double t = theta[0];
    return CurvatureSample{Eigen::VectorXd::Constant(1, lqr::gradient(t, cfg)),
                           SymMatrix::scalar(lqr::approx_hessian_H(t, cfg)),
                           SymMatrix::scalar(lqr::fisher(t, cfg))};
  };
}

CurvatureSource estimated_source(const EnvModel& env, const Policy& policy,
                                 const RolloutPlan& plan) {
  plan.validate();
  return [&env, &policy, plan](const ParamVector& theta, int iteration) {
    RolloutPlan step_plan = plan;
    Rng derive = make_stream(plan.seed, 0x5eedULL + static_cast<std::uint64_t>(iteration));
    step_plan.seed = derive();
    const GradHessEstimate est = estimate_all(env, policy, theta, step_plan);
    return CurvatureSample{est.grad, est.H, est.F};
  };
}

std::vector<double> LearningTrace::errors() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.error);
  return out;
}

LearningTrace run_learning(const CurvatureSource& source, const OptimizerConfig& cfg,
                           const LearningHooks& hooks) {
  cfg.validate();
  LearningTrace trace;
  trace.method = cfg.method;
  trace.alpha = cfg.alpha;

  const auto evaluate_performance = [&](const ParamVector& theta) {
    if (!hooks.performance) return kNaN;
    try {
      return hooks.performance(theta);
    } catch (const UnstableParameter&) {
      return kNaN;
    } catch (const NumericalError&) {
      return kNaN;
    }
  };
  const auto stop = [&](IterationRecord rec, TraceStatus status, std::string message) {
    trace.records.push_back(std::move(rec));
    trace.status = status;
    trace.message = std::move(message);
  };

  ParamVector theta = cfg.theta0;
  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.theta = theta;
    rec.J = evaluate_performance(theta);
    rec.grad_norm = kNaN;
    rec.error = kNaN;
    rec.ratio = kNaN;

    if (hooks.performance && !std::isfinite(rec.J)) {
      stop(std::move(rec), TraceStatus::diverged, "non-finite performance at iteration " +
                                                      std::to_string(k));
      break;
    }
    if (k == cfg.max_iters) {
      stop(std::move(rec), TraceStatus::completed, "");
      break;
    }

    CurvatureSample sample;
    try {
      sample = source(theta, k);
    } catch (const UnstableParameter& e) {
      stop(std::move(rec), TraceStatus::diverged, e.what());
      break;
    } catch (const NumericalError& e) {
      stop(std::move(rec), TraceStatus::diverged, e.what());
      break;
    }
    rec.grad_norm = sample.grad.norm();
    if (!std::isfinite(rec.grad_norm)) {
      stop(std::move(rec), TraceStatus::diverged, "non-finite gradient");
      break;
    }
    if (cfg.grad_tolerance > 0.0 && rec.grad_norm < cfg.grad_tolerance) {
      stop(std::move(rec), TraceStatus::converged, "gradient norm below tolerance");
      break;
    }

    try {
      switch (cfg.method) {
        case Method::gd:
          rec.curvature = SymMatrix::identity(theta.size());
          theta = gd_step(theta, sample.grad, cfg.alpha);
          break;
        case Method::ngd:
          rec.curvature = floored_fisher(sample.F, cfg.lambda_floor);
          theta = qn_step(theta, sample.grad, *rec.curvature, cfg.alpha);
          break;
        case Method::qn:
          rec.curvature = sample.H;
          theta = qn_step(theta, sample.grad, sample.H, cfg.alpha);
          break;
        case Method::qn_reg: {
          const Regularized reg = regularize(sample.H, sample.F, cfg.lambda_floor, cfg.beta);
          rec.curvature = reg.matrix;
          rec.beta = reg.beta;
          theta = qn_step(theta, sample.grad, reg.matrix, cfg.alpha);
          break;
        }
      }
    } catch (const NotPositiveDefinite& e) {
      stop(std::move(rec), TraceStatus::not_positive_definite, e.what());
      break;
    } catch (const NumericalError& e) {
      stop(std::move(rec), TraceStatus::diverged, e.what());
      break;
    }
    trace.records.push_back(std::move(rec));
  }

  if (hooks.theta_star) fill_errors(trace, *hooks.theta_star);
  return trace;
}

void fill_errors(LearningTrace& trace, const ParamVector& reference, bool proxy) {
  trace.error_is_proxy = proxy;
  auto& recs = trace.records;
  for (auto& r : recs) r.error = (r.theta.values() - reference.values()).norm();
  for (std::size_t k = 0; k < recs.size(); ++k) {
    recs[k].ratio = (k + 1 < recs.size() && recs[k].error > 0.0)
                        ? recs[k + 1].error / recs[k].error
                        : kNaN;
  }
}

void fill_errors_from_best_iterate(LearningTrace& trace) {
  const IterationRecord* best = nullptr;
  for (const auto& r : trace.records) {
    if (std::isfinite(r.J) && (best == nullptr || r.J < best->J)) best = &r;
  }
  if (best == nullptr) return;
  const ParamVector reference = best->theta;
  fill_errors(trace, reference, true);
}

SuperlinearVerdict superlinear_diagnostic(std::span<const double> errors) {
  std::vector<double> finite;
  for (const double e : errors) {
    if (std::isfinite(e)) finite.push_back(e);
  }
  if (finite.size() < 4) {
    throw std::invalid_argument("superlinear_diagnostic: need at least four finite errors");
  }
  SuperlinearVerdict v;
  for (std::size_t k = 0; k + 1 < finite.size(); ++k) {
    if (finite[k] > 0.0) v.ratios.push_back(finite[k + 1] / finite[k]);
  }
  if (v.ratios.empty()) return v;
  v.last_ratio = v.ratios.back();
  const auto n = v.ratios.size();
  v.superlinear_consistent = n >= 3 && v.ratios[n - 3] > v.ratios[n - 2] &&
                             v.ratios[n - 2] > v.ratios[n - 1] &&
                             v.last_ratio < tol::kSuperlinearRatio;
  return v;
}

SuperlinearVerdict superlinear_diagnostic(const LearningTrace& trace) {
  const auto e = trace.errors();
  return superlinear_diagnostic(std::span<const double>(e));
}

}  // namespace qnpg
