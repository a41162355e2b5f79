#include <benchmark/benchmark.h>

#include <vector>

#include "qnpg/environment.hpp"
#include "qnpg/estimators.hpp"
#include "qnpg/policy.hpp"

using namespace qnpg;

// Q-value rollouts for a full 1-D FD stencil, fast path against the generic loop.
static void BM_lqr_stencil_rollouts(benchmark::State& state) {
  const LqrEnv env(LqrConfig{});
  const LinearPolicy policy(1, 1);
  const ParamVector theta{0.8};
  const int horizon = static_cast<int>(state.range(0));
  const bool generic = state.range(1) != 0;
  State s(1);
  s(0) = 0.5;
  std::vector<Action> points = fd_stencil(policy.evaluate(theta, s), 1e-2);
  Rng rng = make_stream(7, 0);
  std::vector<Noise> noise;
  for (int t = 0; t < horizon; ++t) noise.push_back(env.sample_noise(rng));
  std::vector<double> out(points.size());
  for (auto _ : state) {
    if (generic) {
      env.rollout_costs_generic(policy, theta, s, points, noise, out);
    } else {
      env.rollout_costs(policy, theta, s, points, noise, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * horizon * static_cast<int64_t>(points.size()));
}

static void BM_cartpole_stencil_rollouts(benchmark::State& state) {
  const CartPoleEnv env(CartPoleConfig{});
  const LinearPolicy policy(4, 1);
  const ParamVector theta{0.5, 0.1, -0.5, -1.0};
  const int horizon = static_cast<int>(state.range(0));
  const bool generic = state.range(1) != 0;
  State s(4);
  s << 0.05, 0.0, -0.05, 0.1;
  std::vector<Action> points = fd_stencil(policy.evaluate(theta, s), 1e-2);
  Rng rng = make_stream(7, 0);
  std::vector<Noise> noise;
  for (int t = 0; t < horizon; ++t) noise.push_back(env.sample_noise(rng));
  std::vector<double> out(points.size());
  for (auto _ : state) {
    if (generic) {
      env.rollout_costs_generic(policy, theta, s, points, noise, out);
    } else {
      env.rollout_costs(policy, theta, s, points, noise, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * horizon * static_cast<int64_t>(points.size()));
}

static void BM_q_action_derivatives(benchmark::State& state) {
  const LqrEnv env(LqrConfig{});
  const LinearPolicy policy(1, 1);
  RolloutPlan plan;
  plan.horizon = 80;
  plan.n_q = static_cast<int>(state.range(0));
  State s(1);
  s(0) = 1.0;
  Rng rng = make_stream(3, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(q_action_derivatives(env, policy, ParamVector{1.0}, s, plan, rng));
  }
}

static void BM_estimate_all_lqr(benchmark::State& state) {
  const LqrEnv env(LqrConfig{});
  const LinearPolicy policy(1, 1);
  RolloutPlan plan;
  plan.n_outer = static_cast<int>(state.range(0));
  plan.horizon = 80;
  plan.n_q = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_all(env, policy, ParamVector{1.0}, plan));
  }
}

BENCHMARK(BM_lqr_stencil_rollouts)->Args({80, 0})->Args({80, 1});
BENCHMARK(BM_cartpole_stencil_rollouts)->Args({100, 0})->Args({100, 1});
BENCHMARK(BM_q_action_derivatives)->Arg(10)->Arg(50);
BENCHMARK(BM_estimate_all_lqr)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);
