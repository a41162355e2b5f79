#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qnpg/environment.hpp"
#include "qnpg/linalg.hpp"
#include "qnpg/policy.hpp"

namespace qnpg {

/// Monte-Carlo budget for the model-free estimators.
struct RolloutPlan {
  int n_outer = 2000;     // visitation trajectories
  int horizon = 80;       // truncation length of every rollout
  int n_q = 50;           // rollouts averaged per Q evaluation
  double fd_step = 1e-2;  // action finite-difference step δ_a
  std::uint64_t seed = 1;
  bool common_random_numbers = true;
  int workers = 0;        // 0: one per hardware thread

  void validate() const;
};

struct WeightedState {
  State state;
  double weight;  // γ^t
};

struct VisitationSample {
  std::vector<WeightedState> states;
  bool truncated = false;
  std::string diagnostic;
};

/// One closed-loop trajectory s_0 ~ p1, s_{t+1} ~ p(·|s_t, π_θ(s_t)), emitting
/// every visited s_t (t < horizon) with weight γ^t. A non-finite state ends
/// the trajectory early and sets `truncated`.
VisitationSample sample_discounted_states(const EnvModel& env, const Policy& policy,
                                          const ParamVector& theta, int horizon, Rng& rng);

/// Discounted cost of one rollout that applies `a` at `s` and follows π_θ
/// afterwards, driven by a given noise sequence of length `horizon`.
double rollout_cost(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                    const State& s, const Action& a, std::span<const Noise> noise);

/// Q(s, a): average of plan.n_q truncated rollouts.
double estimate_q(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                  const State& s, const Action& a, const RolloutPlan& plan, Rng& rng);

struct ActionDerivatives {
  Eigen::VectorXd grad;  // ∇_a Q
  Eigen::MatrixXd hess;  // ∇²_a Q (symmetric)
};

/// Central-difference stencil around `a`: the centre, ±δ along every axis,
/// then the four diagonal corners for every pair i < j.
std::vector<Action> fd_stencil(const Action& a, double step);

/// Combines Q values on fd_stencil() into first and second derivatives.
ActionDerivatives fd_combine(std::span<const double> values, int action_dim, double step);

/// Finite-difference derivatives of an arbitrary function of the action.
ActionDerivatives fd_action_derivatives(const std::function<double(const Action&)>& q,
                                        const Action& a, double step);

/// ∇_a Q and ∇²_a Q at a = π_θ(s) from rollout estimates of Q on the
/// stencil. With plan.common_random_numbers every stencil point of a given
/// rollout replays the same noise sequence.
ActionDerivatives q_action_derivatives(const EnvModel& env, const Policy& policy,
                                       const ParamVector& theta, const State& s,
                                       const RolloutPlan& plan, Rng& rng);

Eigen::VectorXd grad_a_q(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                         const State& s, const RolloutPlan& plan, Rng& rng);
SymMatrix hess_a_q(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                   const State& s, const RolloutPlan& plan, Rng& rng);

struct VectorEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd se;
};

struct MatrixEstimate {
  SymMatrix mean;
  Eigen::MatrixXd se;
};

struct ScalarEstimate {
  double mean;
  double se;
};

/// Gradient, approximate Hessian H and Fisher matrix F from one shared set of
/// samples. Standard errors are across the plan.n_outer independent
/// trajectories.
struct GradHessEstimate {
  Eigen::VectorXd grad;
  SymMatrix H;
  SymMatrix F;
  int n_samples = 0;
  Eigen::VectorXd grad_se;
  Eigen::MatrixXd H_se;
  Eigen::MatrixXd F_se;
  int truncated_trajectories = 0;
  // γ^horizon / (1 - γ): weight of the discounted tail each rollout ignores.
  double tail_weight = 0.0;
};

GradHessEstimate estimate_all(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                              const RolloutPlan& plan);

/// Σ_t γ^t ∇_θπ(s_t) ∇_aQ(s_t, π(s_t)), averaged over trajectories.
VectorEstimate estimate_gradient(const EnvModel& env, const Policy& policy,
                                 const ParamVector& theta, const RolloutPlan& plan);

/// Σ_t γ^t [∇²_θπ ⊗ ∇_aQ + ∇_θπ ∇²_aQ ∇_θπᵀ], averaged over trajectories.
MatrixEstimate estimate_H(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                          const RolloutPlan& plan);

/// Σ_t γ^t ∇_θπ ∇_θπᵀ. Uses no Q rollouts; visits the same states as
/// estimate_all() for the same plan.
MatrixEstimate estimate_fisher(const EnvModel& env, const Policy& policy,
                               const ParamVector& theta, const RolloutPlan& plan);

/// Discounted return from p1, averaged over `n_rollouts` rollouts of length
/// `horizon`; rollout i uses stream i of `seed`.
ScalarEstimate estimate_performance(const EnvModel& env, const Policy& policy,
                                    const ParamVector& theta, int n_rollouts, int horizon,
                                    std::uint64_t seed);

}  // namespace qnpg
