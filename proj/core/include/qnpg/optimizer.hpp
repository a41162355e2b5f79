#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qnpg/environment.hpp"
#include "qnpg/estimators.hpp"
#include "qnpg/linalg.hpp"
#include "qnpg/policy.hpp"

namespace qnpg {

enum class Method { gd, ngd, qn, qn_reg };

std::string to_string(Method m);
Method parse_method(std::string_view text);

enum class CurvatureKind { oracle, estimated };

std::string to_string(CurvatureKind c);
CurvatureKind parse_curvature(std::string_view text);

struct OptimizerConfig {
  Method method = Method::qn;
  double alpha = 1.0;
  double beta = 0.0;           // lower bound on the Fisher weight used by qn_reg
  double lambda_floor = 1e-3;  // eigenvalue floor for qn_reg and ngd
  int max_iters = 20;
  ParamVector theta0;
  CurvatureKind curvature = CurvatureKind::oracle;
  // Stop once ‖∇J‖ falls below this; 0 disables the test.
  double grad_tolerance = 0.0;

  void validate() const;
};

/// θ - α H⁻¹ ∇J. Propagates NotPositiveDefinite from solve_spd.
ParamVector qn_step(const ParamVector& theta, const Eigen::VectorXd& grad, const SymMatrix& H,
                    double alpha);

/// θ - α F⁻¹ ∇J, with F shifted by λ_floor·I when its smallest eigenvalue is
/// below λ_floor.
ParamVector ngd_step(const ParamVector& theta, const Eigen::VectorXd& grad, const SymMatrix& F,
                     double alpha, double lambda_floor);

/// θ - α ∇J.
ParamVector gd_step(const ParamVector& theta, const Eigen::VectorXd& grad, double alpha);

/// Fisher matrix with the ngd eigenvalue floor applied.
SymMatrix floored_fisher(const SymMatrix& F, double lambda_floor);

struct Regularized {
  SymMatrix matrix;
  double beta;
};

/// H + βF with the smallest β >= beta_min (bracketed by bisection to
/// tol::kBetaBisection) such that min_eigenvalue(H + βF) >= λ_floor.
/// H is returned unchanged with β = 0 when it already clears the floor.
/// If F is not positive definite, H + βI is used with the exact β instead.
Regularized regularize(const SymMatrix& H, const SymMatrix& F, double lambda_floor,
                       double beta_min = 0.0);

struct CurvatureSample {
  Eigen::VectorXd grad;
  SymMatrix H;
  SymMatrix F;
};

/// Supplies ∇J, H and F at θ for iteration k.
using CurvatureSource = std::function<CurvatureSample(const ParamVector& theta, int iteration)>;

/// Closed-form scalar-LQR values. Throws UnstableParameter outside the
/// stability domain.
CurvatureSource lqr_oracle_source(const LqrConfig& cfg);

/// Monte-Carlo estimates; iteration k uses a seed derived from (plan.seed, k).
/// `env` and `policy` must outlive the returned source.
CurvatureSource estimated_source(const EnvModel& env, const Policy& policy,
                                 const RolloutPlan& plan);

struct IterationRecord {
  int k = 0;
  ParamVector theta;
  double J = 0.0;
  double grad_norm = 0.0;
  std::optional<SymMatrix> curvature;  // matrix used for the step out of θ_k
  double beta = 0.0;
  double error = 0.0;  // ‖θ_k - θ*‖
  double ratio = 0.0;  // e_{k+1}/e_k
};

enum class TraceStatus { completed, converged, diverged, not_positive_definite };

std::string to_string(TraceStatus s);

struct LearningTrace {
  Method method = Method::qn;
  double alpha = 0.0;
  std::vector<IterationRecord> records;
  TraceStatus status = TraceStatus::completed;
  std::string message;
  bool error_is_proxy = false;

  bool diverged() const noexcept { return status == TraceStatus::diverged; }
  std::vector<double> errors() const;
};

struct LearningHooks {
  std::function<double(const ParamVector&)> performance;
  std::optional<ParamVector> theta_star;
};

/// Iterates the configured update rule for cfg.max_iters steps, recording
/// θ_k, J(θ_k) and ‖∇J(θ_k)‖. The last record holds the final iterate and
/// carries no step. Divergence (non-finite values or an unstable θ) ends the
/// trace early with status diverged.
LearningTrace run_learning(const CurvatureSource& source, const OptimizerConfig& cfg,
                           const LearningHooks& hooks = {});

/// Fills error and ratio columns against `reference`.
void fill_errors(LearningTrace& trace, const ParamVector& reference, bool proxy = false);

/// Uses the iterate with the lowest finite J as a proxy optimum.
void fill_errors_from_best_iterate(LearningTrace& trace);

struct SuperlinearVerdict {
  std::vector<double> ratios;
  double last_ratio = 0.0;
  bool superlinear_consistent = false;
};

/// Describes the error sequence e_k: the ratios e_{k+1}/e_k and whether the
/// final three ratios decrease strictly with the last below
/// tol::kSuperlinearRatio. Needs at least four finite errors.
SuperlinearVerdict superlinear_diagnostic(std::span<const double> errors);
SuperlinearVerdict superlinear_diagnostic(const LearningTrace& trace);

}  // namespace qnpg
