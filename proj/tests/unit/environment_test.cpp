#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qnpg/environment.hpp"
#include "qnpg/errors.hpp"
#include "qnpg/lqr_oracle.hpp"
#include "qnpg/policy.hpp"

using namespace qnpg;
using qnpg::oracle::Gen;

namespace {

State scalar_state(double v) {
  State s(1);
  s(0) = v;
  return s;
}

Action scalar_action(double v) { return scalar_state(v); }

CartPoleState rest() { return CartPoleState::Zero(); }

double max_rel_energy_drift(double phi0, double h, int steps, const CartPoleConfig& cfg) {
  const auto deriv = [&cfg](const CartPoleState& x, double u) {
    return cartpole_derivative(x, u, cfg);
  };
  CartPoleState s(0.0, 0.0, 0.0, phi0);
  double worst = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double e0 = cartpole_energy(s, cfg);
    s = rk4_step(deriv, s, 0.0, h);
    const double e1 = cartpole_energy(s, cfg);
    worst = std::max(worst, std::abs(e1 - e0) / std::abs(e0));
  }
  return worst;
}

}  // namespace

TEST(LqrStep, Examples) {
  EXPECT_NEAR(lqr_step(0.5, -0.3, 0.1), 0.3, 1e-15);
  for (double s : {-3.0, 0.0, 0.25, 7.0}) EXPECT_EQ(lqr_step(s, -s, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(lqr_stage_cost(1.0, -1.0), 1.0);
}

TEST(LqrConfig, Validation) {
  EXPECT_NO_THROW(LqrConfig{}.validate());
  EXPECT_THROW((LqrConfig{-0.1, 0.1, 0.9}).validate(), ConfigError);
  EXPECT_THROW((LqrConfig{0.1, -0.1, 0.9}).validate(), ConfigError);
  EXPECT_THROW((LqrConfig{0.1, 0.1, 1.0}).validate(), ConfigError);
  EXPECT_THROW((LqrConfig{0.1, 0.1, 0.0}).validate(), ConfigError);
}

TEST(LqrEnv, NoiseMeanMonteCarlo) {
  const LqrEnv env(LqrConfig{});
  Rng rng = make_stream(2024, 0);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += env.step(scalar_state(1.0), scalar_action(-0.5), rng).next(0);
  EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(0.1 / n));
}

TEST(LqrEnv, StepReturnsStageCost) {
  const LqrEnv env(LqrConfig{});
  Rng rng = make_stream(1, 0);
  EXPECT_DOUBLE_EQ(env.step(scalar_state(2.0), scalar_action(1.0), rng).cost, 2.5);
}

TEST(LqrEnv, SameStreamSameTrajectory) {
  const LqrEnv env(LqrConfig{});
  Rng a = make_stream(77, 3);
  Rng b = make_stream(77, 3);
  State sa = env.sample_initial(a);
  State sb = env.sample_initial(b);
  for (int t = 0; t < 100; ++t) {
    ASSERT_EQ(sa(0), sb(0));
    sa = env.step(sa, scalar_action(-0.5 * sa(0)), a).next;
    sb = env.step(sb, scalar_action(-0.5 * sb(0)), b).next;
  }
}

TEST(Streams, DistinctStreamsDiffer) {
  Rng a = make_stream(5, 0);
  Rng b = make_stream(5, 1);
  Rng c = make_stream(6, 0);
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_NE(x, c());
}

TEST(LqrEnv, ClosedLoopDiscountedSecondMomentMatchesOracle) {
  const LqrConfig cfg{};
  const LqrEnv env(cfg);
  const LinearPolicy policy(1, 1);
  const double theta = 0.8;
  const int rollouts = 10000;
  const int horizon = 200;
  std::vector<double> sums(rollouts);
  for (int i = 0; i < rollouts; ++i) {
    Rng rng = make_stream(99, static_cast<std::uint64_t>(i));
    State s = env.sample_initial(rng);
    double w = 1.0;
    double acc = 0.0;
    for (int t = 0; t < horizon; ++t) {
      acc += w * s(0) * s(0);
      s = env.step(s, policy.evaluate(ParamVector{theta}, s), rng).next;
      w *= cfg.gamma;
    }
    sums[static_cast<std::size_t>(i)] = acc;
  }
  double mean = 0.0;
  for (double v : sums) mean += v;
  mean /= rollouts;
  double var = 0.0;
  for (double v : sums) var += (v - mean) * (v - mean);
  const double se = std::sqrt(var / (rollouts - 1) / rollouts);
  EXPECT_NEAR(mean, lqr::expected_s2(theta, cfg), 3.0 * se);
}

TEST(CartPole, AccelsAtRestWithoutForce) {
  const Eigen::Vector2d acc = cartpole_accels(rest(), 0.0, CartPoleConfig{});
  EXPECT_EQ(acc(0), 0.0);
  EXPECT_EQ(acc(1), 0.0);
}

TEST(CartPole, AccelsAtRestWithUnitForce) {
  const Eigen::Vector2d acc = cartpole_accels(rest(), 1.0, CartPoleConfig{});
  // [[0.7, 0.03], [0.03, 0.006]] x = (1, 0), det = 0.0033
  EXPECT_NEAR(acc(0), 0.006 / 0.0033, 1e-12);
  EXPECT_NEAR(acc(1), -0.03 / 0.0033, 1e-12);
  EXPECT_NEAR(acc(0), 1.8182, 1e-4);
  EXPECT_NEAR(acc(1), -9.0909, 1e-4);
}

TEST(CartPole, AccelsAtInvertedPosition) {
  const Eigen::Vector2d acc =
      cartpole_accels(CartPoleState(0.0, 0.0, 0.0, std::numbers::pi), 0.0, CartPoleConfig{});
  EXPECT_NEAR(acc(0), 0.0, 1e-12);
  EXPECT_NEAR(acc(1), 0.0, 1e-12);
}

TEST(CartPole, AccelsSatisfyBothEquationsOfMotion) {
  const CartPoleConfig cfg{};
  const double M = cfg.cart_mass, m = cfg.pole_mass, l = cfg.pole_length, g = cfg.gravity;
  Gen gen(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const CartPoleState s(gen.uniform(-3, 3), gen.uniform(-3, 3), gen.uniform(-6, 6),
                          gen.uniform(-4, 4));
    const double u = gen.uniform(-20, 20);
    const Eigen::Vector2d acc = cartpole_accels(s, u, cfg);
    const double phi = s(3), phid = s(2);
    const double r1 = (M + m) * acc(0) + 0.5 * m * l * std::cos(phi) * acc(1) -
                      (0.5 * m * l * phid * phid * std::sin(phi) + u);
    const double r2 = 0.5 * m * l * std::cos(phi) * acc(0) + m * l * l / 3.0 * acc(1) +
                      0.5 * m * g * l * std::sin(phi);
    ASSERT_LT(std::abs(r1), 1e-12);
    ASSERT_LT(std::abs(r2), 1e-12);
  }
}

TEST(CartPole, DerivativeLayout) {
  const CartPoleConfig cfg{};
  const CartPoleState s(0.3, -1.0, 0.2, 0.1);
  const CartPoleState d = cartpole_derivative(s, 0.5, cfg);
  const Eigen::Vector2d acc = cartpole_accels(s, 0.5, cfg);
  EXPECT_EQ(d(0), acc(0));
  EXPECT_EQ(d(1), s(0));
  EXPECT_EQ(d(2), acc(1));
  EXPECT_EQ(d(3), s(2));
}

TEST(CartPoleConfig, Validation) {
  CartPoleConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.pole_mass = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = CartPoleConfig{};
  cfg.gamma = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = CartPoleConfig{};
  cfg.dt = -0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = CartPoleConfig{};
  cfg.substeps = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Rk4, ZeroDerivativeIsFixedPoint) {
  const auto zero = [](const Eigen::Vector3d&, double) { return Eigen::Vector3d::Zero().eval(); };
  const Eigen::Vector3d s(1.0, -2.0, 3.5);
  const Eigen::Vector3d next = rk4_step(zero, s, 0.0, 0.1);
  EXPECT_EQ(next, s);
}

TEST(Rk4, ExponentialGrowth) {
  const auto grow = [](const Eigen::Matrix<double, 1, 1>& x, double) { return x; };
  const Eigen::Matrix<double, 1, 1> s = Eigen::Matrix<double, 1, 1>::Constant(1.0);
  const double h = 0.1;
  const double got = rk4_step(grow, s, 0.0, h)(0);
  EXPECT_NEAR(got, 1 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24, 1e-15);
  EXPECT_NEAR(got, 1.105170833, 1e-9);
  EXPECT_LT(std::abs(got - std::exp(0.1)), 1e-7);
}

TEST(Rk4, RejectsNonPositiveStep) {
  const auto grow = [](const Eigen::Matrix<double, 1, 1>& x, double) { return x; };
  const Eigen::Matrix<double, 1, 1> s = Eigen::Matrix<double, 1, 1>::Constant(1.0);
  EXPECT_THROW(rk4_step(grow, s, 0.0, 0.0), ConfigError);
  EXPECT_THROW(rk4_step(grow, s, 0.0, -0.1), ConfigError);
}

TEST(Rk4, NonFiniteStageThrows) {
  const auto blow = [](const Eigen::Matrix<double, 1, 1>& x, double) {
    return Eigen::Matrix<double, 1, 1>::Constant(x(0) > 1.0 ? NAN : 1e3);
  };
  const Eigen::Matrix<double, 1, 1> s = Eigen::Matrix<double, 1, 1>::Constant(0.5);
  EXPECT_THROW(rk4_step(blow, s, 0.0, 0.1), NumericalError);
}

TEST(Rk4, FreePendulumEnergyDriftPerStep) {
  const CartPoleConfig cfg{};
  EXPECT_LT(max_rel_energy_drift(0.1, 0.01, 1000, cfg), 1e-6);
}

TEST(Rk4, EnergyIsNotConservedAtTheSamplingTime) {
  // Documents the integrator's regime: one RK4 step per 0.1 s sample loses
  // far more than 1e-6 of the energy of the swinging pendulum.
  const CartPoleConfig cfg{};
  EXPECT_GT(max_rel_energy_drift(0.1, cfg.dt, 100, cfg), 1e-5);
}

TEST(CartPoleEnv, NoiseFreeRestStaysAtRest) {
  CartPoleConfig cfg;
  cfg.noise_var = 0.0;
  const CartPoleEnv env(cfg);
  Rng rng = make_stream(1, 0);
  State s(4);
  s.setZero();
  Action a(1);
  a(0) = 0.0;
  const Transition tr = env.step(s, a, rng);
  EXPECT_EQ(tr.next.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(tr.cost, 0.0);
}

TEST(CartPoleEnv, StageCost) {
  const CartPoleEnv env(CartPoleConfig{});
  State s(4);
  s << 0, 1, 0, 0;
  Action a(1);
  a(0) = 10.0;
  EXPECT_DOUBLE_EQ(env.stage_cost(s, a), 2.0);
}

TEST(CartPoleEnv, NoiseVarianceMonteCarlo) {
  const CartPoleConfig cfg{};
  const CartPoleEnv env(cfg);
  State s(4);
  s << 0.1, -0.2, 0.3, 0.05;
  Action a(1);
  a(0) = 0.4;
  const CartPoleState f = cartpole_discrete(CartPoleState(s), 0.4, cfg);
  Rng rng = make_stream(8, 0);
  const int n = 100000;
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  Eigen::Vector4d sum_sq = Eigen::Vector4d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector4d d = CartPoleState(env.step(s, a, rng).next) - f;
    sum += d;
    sum_sq += d.cwiseProduct(d);
  }
  for (int i = 0; i < 4; ++i) {
    const double mean = sum(i) / n;
    const double var = sum_sq(i) / n - mean * mean;
    EXPECT_NEAR(var, 1e-4, 0.05e-4) << "coordinate " << i;
  }
}

TEST(CartPoleEnv, SubstepsRefineTheDiscreteMap) {
  CartPoleConfig coarse;
  CartPoleConfig fine;
  fine.substeps = 50;
  CartPoleConfig finer;
  finer.substeps = 100;
  const CartPoleState s(0.0, 0.0, 0.0, 0.3);
  const double e_coarse = (cartpole_discrete(s, 0.0, coarse) - cartpole_discrete(s, 0.0, finer)).norm();
  const double e_fine = (cartpole_discrete(s, 0.0, fine) - cartpole_discrete(s, 0.0, finer)).norm();
  EXPECT_LT(e_fine, e_coarse);
}

TEST(RolloutCosts, LqrFastPathMatchesGenericLoop) {
  const LqrEnv env(LqrConfig{});
  const LinearPolicy policy(1, 1);
  Gen gen(41);
  for (int trial = 0; trial < 50; ++trial) {
    const ParamVector theta{gen.uniform(0.3, 1.6)};
    const State s = scalar_state(gen.uniform(-2, 2));
    std::vector<Action> first;
    for (int p = 0; p < 11; ++p) first.push_back(scalar_action(gen.uniform(-2, 2)));
    Rng rng = make_stream(3, static_cast<std::uint64_t>(trial));
    std::vector<Noise> noise;
    const int horizon = gen.integer(0, 60);
    for (int t = 0; t < horizon; ++t) noise.push_back(env.sample_noise(rng));
    std::vector<double> fast(first.size()), slow(first.size());
    env.rollout_costs(policy, theta, s, first, noise, fast);
    env.rollout_costs_generic(policy, theta, s, first, noise, slow);
    for (std::size_t p = 0; p < first.size(); ++p) ASSERT_EQ(fast[p], slow[p]);
  }
}

TEST(RolloutCosts, CartPoleFastPathMatchesGenericLoop) {
  const CartPoleEnv env(CartPoleConfig{});
  const LinearPolicy policy(4, 1);
  Gen gen(42);
  for (int trial = 0; trial < 20; ++trial) {
    const ParamVector theta(gen.vector(4, -1, 1));
    State s(4);
    for (int i = 0; i < 4; ++i) s(i) = gen.uniform(-0.2, 0.2);
    std::vector<Action> first;
    for (int p = 0; p < 3; ++p) first.push_back(scalar_action(gen.uniform(-1, 1)));
    Rng rng = make_stream(4, static_cast<std::uint64_t>(trial));
    std::vector<Noise> noise;
    for (int t = 0; t < 50; ++t) noise.push_back(env.sample_noise(rng));
    std::vector<double> fast(first.size()), slow(first.size());
    env.rollout_costs(policy, theta, s, first, noise, fast);
    env.rollout_costs_generic(policy, theta, s, first, noise, slow);
    for (std::size_t p = 0; p < first.size(); ++p) ASSERT_EQ(fast[p], slow[p]);
  }
}

TEST(RolloutCosts, OtherPoliciesUseTheGenericLoop) {
  const LqrEnv env(LqrConfig{});
  const BilinearPolicy policy;
  const ParamVector theta{0.8, 1.1};
  std::vector<Action> first{scalar_action(0.2), scalar_action(-0.4)};
  Rng rng = make_stream(5, 0);
  std::vector<Noise> noise;
  for (int t = 0; t < 30; ++t) noise.push_back(env.sample_noise(rng));
  std::vector<double> a(2), b(2);
  env.rollout_costs(policy, theta, scalar_state(0.7), first, noise, a);
  env.rollout_costs_generic(policy, theta, scalar_state(0.7), first, noise, b);
  EXPECT_EQ(a, b);
}
