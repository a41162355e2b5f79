#include "qnpg/estimators.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"
#include "qnpg/errors.hpp"
#include "qnpg/tensor.hpp"

namespace qnpg {

void RolloutPlan::validate() const {
  if (n_outer < 1 || horizon < 1 || n_q < 1) {
    throw ConfigError("RolloutPlan: n_outer, horizon and n_q must be at least 1");
  }
  if (!(fd_step > 0.0)) {
    throw ConfigError("RolloutPlan: fd_step must be positive");
  }
}

VisitationSample sample_discounted_states(const EnvModel& env, const Policy& policy,
                                          const ParamVector& theta, int horizon, Rng& rng) {
  if (horizon < 1) {
    throw ConfigError("sample_discounted_states: horizon must be at least 1");
  }
  VisitationSample out;
  out.states.reserve(static_cast<std::size_t>(horizon));
  const double gamma = env.discount();
  State s = env.sample_initial(rng);
  double weight = 1.0;
  for (int t = 0; t < horizon; ++t) {
    if (!s.allFinite()) {
      out.truncated = true;
      std::ostringstream msg;
      msg << "non-finite state at t = " << t << "; trajectory truncated";
      out.diagnostic = msg.str();
      break;
    }
    out.states.push_back({s, weight});
    if (t + 1 < horizon) {
      try {
        s = env.transition(s, policy.evaluate(theta, s), env.sample_noise(rng));
      } catch (const NumericalError& e) {
        out.truncated = true;
        out.diagnostic = e.what();
        break;
      }
      weight *= gamma;
    }
  }
  return out;
}

double rollout_cost(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                    const State& s, const Action& a, std::span<const Noise> noise) {
  double out = 0.0;
  env.rollout_costs(policy, theta, s, std::span<const Action>(&a, 1), noise,
                    std::span<double>(&out, 1));
  return out;
}

namespace {

void draw_noise(const EnvModel& env, Rng& rng, std::vector<Noise>& buffer) {
  for (auto& n : buffer) n = env.sample_noise(rng);
}

void require_finite(double value, const char* where) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << where << ": non-finite rollout cost";
    throw NumericalError(msg.str());
  }
}

}  // namespace

double estimate_q(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                  const State& s, const Action& a, const RolloutPlan& plan, Rng& rng) {
  plan.validate();
  std::vector<Noise> noise(static_cast<std::size_t>(plan.horizon));
  double sum = 0.0;
  for (int j = 0; j < plan.n_q; ++j) {
    draw_noise(env, rng, noise);
    sum += rollout_cost(env, policy, theta, s, a, noise);
  }
  const double q = sum / plan.n_q;
  require_finite(q, "estimate_q");
  return q;
}

std::vector<Action> fd_stencil(const Action& a, double step) {
  const int n = static_cast<int>(a.size());
  std::vector<Action> points;
  points.reserve(static_cast<std::size_t>(1 + 2 * n + 2 * n * (n - 1)));
  points.push_back(a);
  for (int i = 0; i < n; ++i) {
    Action plus = a;
    Action minus = a;
    plus(i) += step;
    minus(i) -= step;
    points.push_back(plus);
    points.push_back(minus);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (const double si : {1.0, -1.0}) {
        for (const double sj : {1.0, -1.0}) {
          Action corner = a;
          corner(i) += si * step;
          corner(j) += sj * step;
          points.push_back(corner);
        }
      }
    }
  }
  return points;
}

ActionDerivatives fd_combine(std::span<const double> values, int action_dim, double step) {
  const int n = action_dim;
  const auto expected = static_cast<std::size_t>(1 + 2 * n + 2 * n * (n - 1));
  if (values.size() != expected) {
    throw DimensionError("fd_combine: value count does not match the stencil size");
  }
  ActionDerivatives out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  const double center = values[0];
  for (int i = 0; i < n; ++i) {
    const double plus = values[static_cast<std::size_t>(1 + 2 * i)];
    const double minus = values[static_cast<std::size_t>(2 + 2 * i)];
    out.grad(i) = (plus - minus) / (2.0 * step);
    out.hess(i, i) = (plus + minus - 2.0 * center) / (step * step);
  }
  std::size_t k = static_cast<std::size_t>(1 + 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double pp = values[k];
      const double pm = values[k + 1];
      const double mp = values[k + 2];
      const double mm = values[k + 3];
      k += 4;
      const double cross = (pp - pm - mp + mm) / (4.0 * step * step);
      out.hess(i, j) = cross;
      out.hess(j, i) = cross;
    }
  }
  return out;
}

ActionDerivatives fd_action_derivatives(const std::function<double(const Action&)>& q,
                                        const Action& a, double step) {
  const auto points = fd_stencil(a, step);
  std::vector<double> values;
  values.reserve(points.size());
  for (const auto& p : points) values.push_back(q(p));
  return fd_combine(values, static_cast<int>(a.size()), step);
}

ActionDerivatives q_action_derivatives(const EnvModel& env, const Policy& policy,
                                       const ParamVector& theta, const State& s,
                                       const RolloutPlan& plan, Rng& rng) {
  const Action a = policy.evaluate(theta, s);
  const auto points = fd_stencil(a, plan.fd_step);
  std::vector<double> sums(points.size(), 0.0);
  std::vector<Noise> noise(static_cast<std::size_t>(plan.horizon));
  std::vector<double> costs(points.size(), 0.0);
  for (int j = 0; j < plan.n_q; ++j) {
    if (plan.common_random_numbers) {
      draw_noise(env, rng, noise);
      env.rollout_costs(policy, theta, s, points, noise, costs);
    } else {
      for (std::size_t p = 0; p < points.size(); ++p) {
        draw_noise(env, rng, noise);
        costs[p] = rollout_cost(env, policy, theta, s, points[p], noise);
      }
    }
    for (std::size_t p = 0; p < points.size(); ++p) sums[p] += costs[p];
  }
  for (auto& v : sums) {
    v /= plan.n_q;
    require_finite(v, "q_action_derivatives");
  }
  return fd_combine(sums, policy.action_dim(), plan.fd_step);
}

Eigen::VectorXd grad_a_q(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                         const State& s, const RolloutPlan& plan, Rng& rng) {
  return q_action_derivatives(env, policy, theta, s, plan, rng).grad;
}

SymMatrix hess_a_q(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                   const State& s, const RolloutPlan& plan, Rng& rng) {
  return SymMatrix(q_action_derivatives(env, policy, theta, s, plan, rng).hess);
}

namespace {

// Streams 2i and 2i+1 of the plan seed drive the visitation and the Q
// rollouts of trajectory i, so Fisher-only estimates see the same states.
Rng visitation_stream(const RolloutPlan& plan, int i) {
  return make_stream(plan.seed, 2 * static_cast<std::uint64_t>(i));
}

Rng q_stream(const RolloutPlan& plan, int i) {
  return make_stream(plan.seed, 2 * static_cast<std::uint64_t>(i) + 1);
}

struct TrajectoryTerms {
  Eigen::VectorXd grad;
  Eigen::MatrixXd H;
  Eigen::MatrixXd F;
  bool truncated = false;
};

void check_policy_env(const EnvModel& env, const Policy& policy, const ParamVector& theta) {
  if (env.state_dim() != policy.state_dim() || env.action_dim() != policy.action_dim() ||
      theta.size() != policy.param_dim()) {
    std::ostringstream msg;
    msg << "estimator: env (" << env.state_dim() << " states, " << env.action_dim()
        << " actions) does not match policy (" << policy.state_dim() << ", "
        << policy.action_dim() << ") or theta length " << theta.size();
    throw DimensionError(msg.str());
  }
}

void mean_and_se(const std::vector<Eigen::MatrixXd>& samples, Eigen::MatrixXd& mean,
                 Eigen::MatrixXd& se) {
  const auto n = static_cast<double>(samples.size());
  mean = Eigen::MatrixXd::Zero(samples.front().rows(), samples.front().cols());
  for (const auto& x : samples) mean += x;
  mean /= n;
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(mean.rows(), mean.cols());
  for (const auto& x : samples) sq += (x - mean).cwiseAbs2();
  if (samples.size() > 1) {
    se = (sq / (n - 1.0) / n).cwiseSqrt();
  } else {
    se = Eigen::MatrixXd::Constant(mean.rows(), mean.cols(),
                                   std::numeric_limits<double>::infinity());
  }
}

std::vector<TrajectoryTerms> collect(const EnvModel& env, const Policy& policy,
                                     const ParamVector& theta, const RolloutPlan& plan,
                                     bool with_q) {
  plan.validate();
  check_policy_env(env, policy, theta);
  const int n_theta = policy.param_dim();
  std::vector<TrajectoryTerms> terms(static_cast<std::size_t>(plan.n_outer));

  detail::parallel_for(plan.n_outer, plan.workers, [&](int i) {
    Rng visit_rng = visitation_stream(plan, i);
    Rng rollout_rng = q_stream(plan, i);
    const VisitationSample visits =
        sample_discounted_states(env, policy, theta, plan.horizon, visit_rng);

    TrajectoryTerms t{Eigen::VectorXd::Zero(n_theta), Eigen::MatrixXd::Zero(n_theta, n_theta),
                      Eigen::MatrixXd::Zero(n_theta, n_theta), visits.truncated};
    for (const auto& [s, w] : visits.states) {
      const Eigen::MatrixXd jac = policy.jacobian(theta, s);
      t.F.noalias() += w * jac * jac.transpose();
      if (!with_q) continue;
      const ActionDerivatives dq =
          q_action_derivatives(env, policy, theta, s, plan, rollout_rng);
      t.grad.noalias() += w * jac * dq.grad;
      t.H.noalias() += w * (tensor_vec_product(policy.param_hessian(theta, s), dq.grad) +
                            jac * dq.hess * jac.transpose());
    }
    terms[static_cast<std::size_t>(i)] = std::move(t);
  });
  return terms;
}

MatrixEstimate matrix_estimate(const std::vector<TrajectoryTerms>& terms,
                               Eigen::MatrixXd TrajectoryTerms::*field) {
  std::vector<Eigen::MatrixXd> samples;
  samples.reserve(terms.size());
  for (const auto& t : terms) samples.push_back(t.*field);
  Eigen::MatrixXd mean;
  Eigen::MatrixXd se;
  mean_and_se(samples, mean, se);
  return {SymMatrix(mean), se};
}

VectorEstimate gradient_estimate(const std::vector<TrajectoryTerms>& terms) {
  std::vector<Eigen::MatrixXd> samples;
  samples.reserve(terms.size());
  for (const auto& t : terms) samples.emplace_back(t.grad);
  Eigen::MatrixXd mean;
  Eigen::MatrixXd se;
  mean_and_se(samples, mean, se);
  return {mean.col(0), se.col(0)};
}

}  // namespace

GradHessEstimate estimate_all(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                              const RolloutPlan& plan) {
  const auto terms = collect(env, policy, theta, plan, true);
  const VectorEstimate grad = gradient_estimate(terms);
  const MatrixEstimate H = matrix_estimate(terms, &TrajectoryTerms::H);
  const MatrixEstimate F = matrix_estimate(terms, &TrajectoryTerms::F);

  GradHessEstimate out{grad.mean, H.mean, F.mean, plan.n_outer, grad.se, H.se, F.se, 0, 0.0};
  for (const auto& t : terms) out.truncated_trajectories += t.truncated ? 1 : 0;
  const double gamma = env.discount();
  out.tail_weight = std::pow(gamma, plan.horizon) / (1.0 - gamma);
  return out;
}

VectorEstimate estimate_gradient(const EnvModel& env, const Policy& policy,
                                 const ParamVector& theta, const RolloutPlan& plan) {
  return gradient_estimate(collect(env, policy, theta, plan, true));
}

MatrixEstimate estimate_H(const EnvModel& env, const Policy& policy, const ParamVector& theta,
                          const RolloutPlan& plan) {
  return matrix_estimate(collect(env, policy, theta, plan, true), &TrajectoryTerms::H);
}

MatrixEstimate estimate_fisher(const EnvModel& env, const Policy& policy,
                               const ParamVector& theta, const RolloutPlan& plan) {
  return matrix_estimate(collect(env, policy, theta, plan, false), &TrajectoryTerms::F);
}

ScalarEstimate estimate_performance(const EnvModel& env, const Policy& policy,
                                    const ParamVector& theta, int n_rollouts, int horizon,
                                    std::uint64_t seed) {
  if (n_rollouts < 1 || horizon < 1) {
    throw ConfigError("estimate_performance: n_rollouts and horizon must be at least 1");
  }
  const double gamma = env.discount();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n_rollouts; ++i) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(i));
    State s = env.sample_initial(rng);
    double discount = 1.0;
    double total = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const Action a = policy.evaluate(theta, s);
      total += discount * env.stage_cost(s, a);
      if (!std::isfinite(total)) break;
      try {
        s = env.transition(s, a, env.sample_noise(rng));
      } catch (const NumericalError&) {
        total = std::numeric_limits<double>::infinity();
        break;
      }
      discount *= gamma;
    }
    if (!std::isfinite(total)) {
      const double inf = std::numeric_limits<double>::infinity();
      return {inf, inf};
    }
    sum += total;
    sum_sq += total * total;
  }
  const double n = n_rollouts;
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace qnpg
