#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "qnpg/errors.hpp"
#include "qnpg/policy.hpp"
#include "qnpg/types.hpp"

namespace qnpg {

using Rng = std::mt19937_64;

/// Independent generator for work item `stream` of a run seeded with `seed`.
/// The same (seed, stream) pair always yields the same sequence.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// One N(0, 1) draw (ziggurat).
double standard_normal(Rng& rng);

struct Transition {
  State next;
  double cost;
};

/// Sampling-only MDP. The randomness of one transition is an explicit noise
/// vector so that callers can replay a noise sequence across perturbed
/// actions (common random numbers); step() draws it internally.
class EnvModel {
 public:
  virtual ~EnvModel() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const noexcept = 0;
  virtual int action_dim() const noexcept = 0;
  virtual int noise_dim() const noexcept = 0;
  virtual double discount() const noexcept = 0;

  virtual State sample_initial(Rng& rng) const = 0;
  virtual Noise sample_noise(Rng& rng) const = 0;
  virtual State transition(const State& s, const Action& a, const Noise& noise) const = 0;
  virtual double stage_cost(const State& s, const Action& a) const = 0;

  Transition step(const State& s, const Action& a, Rng& rng) const {
    return {transition(s, a, sample_noise(rng)), stage_cost(s, a)};
  }

  /// Discounted costs of rollouts that apply first[p] at s and follow π_θ
  /// afterwards, every rollout driven by the same noise sequence (one entry
  /// per step). Writes out[p]. Models may override with a specialised loop
  /// that must agree with rollout_costs_generic().
  virtual void rollout_costs(const Policy& policy, const ParamVector& theta, const State& s,
                             std::span<const Action> first, std::span<const Noise> noise,
                             std::span<double> out) const {
    rollout_costs_generic(policy, theta, s, first, noise, out);
  }

  void rollout_costs_generic(const Policy& policy, const ParamVector& theta, const State& s,
                             std::span<const Action> first, std::span<const Noise> noise,
                             std::span<double> out) const;
};

// ---------------------------------------------------------------------------
// Scalar LQR: s+ = s + a + w, w ~ N(0, σ²), s0 ~ N(0, σ0²), ℓ = 0.5(s² + a²).

struct LqrConfig {
  double sigma0_sq = 0.1;
  double sigma_sq = 0.1;
  double gamma = 0.9;

  void validate() const;
};

inline double lqr_step(double s, double a, double w) { return s + a + w; }
inline double lqr_stage_cost(double s, double a) { return 0.5 * (s * s + a * a); }

class LqrEnv final : public EnvModel {
 public:
  explicit LqrEnv(LqrConfig cfg);

  const LqrConfig& config() const noexcept { return cfg_; }

  std::string name() const override { return "lqr"; }
  int state_dim() const noexcept override { return 1; }
  int action_dim() const noexcept override { return 1; }
  int noise_dim() const noexcept override { return 1; }
  double discount() const noexcept override { return cfg_.gamma; }

  State sample_initial(Rng& rng) const override;
  Noise sample_noise(Rng& rng) const override;
  State transition(const State& s, const Action& a, const Noise& noise) const override;
  double stage_cost(const State& s, const Action& a) const override;
  void rollout_costs(const Policy& policy, const ParamVector& theta, const State& s,
                     std::span<const Action> first, std::span<const Noise> noise,
                     std::span<double> out) const override;

 private:
  LqrConfig cfg_;
  double sigma0_;
  double sigma_;
};

// ---------------------------------------------------------------------------
// Cart-pendulum. State ordering is (x_dot, x, phi_dot, phi); the action is the
// horizontal force u on the cart.

struct CartPoleConfig {
  double cart_mass = 0.5;    // M [kg]
  double pole_mass = 0.2;    // m [kg]
  double pole_length = 0.3;  // l [m]
  double gravity = 9.8;      // g [m/s^2]
  double dt = 0.1;           // sampling time [s]
  int substeps = 1;          // RK4 steps per sampling interval
  double gamma = 0.95;
  double noise_var = 1e-4;   // per-coordinate variance of ξ
  double action_cost = 0.01;
  double init_var = 0.01;    // per-coordinate variance of s0 ~ N(0, init_var I)

  void validate() const;
};

using CartPoleState = Eigen::Vector4d;

/// (x_ddot, phi_ddot) from the coupled equations of motion
///   (M+m) x_ddot + ½ m l cosφ φ_ddot = ½ m l φ_dot² sinφ + u
///   ½ m l cosφ x_ddot + ⅓ m l² φ_ddot = -½ m g l sinφ
Eigen::Vector2d cartpole_accels(const CartPoleState& s, double u, const CartPoleConfig& cfg);

/// Time derivative of (x_dot, x, phi_dot, phi).
CartPoleState cartpole_derivative(const CartPoleState& s, double u, const CartPoleConfig& cfg);

/// Total mechanical energy: kinetic energy plus the potential -½ m g l cosφ.
double cartpole_energy(const CartPoleState& s, const CartPoleConfig& cfg);

/// Classical fourth-order Runge-Kutta step with the action held constant.
/// Throws NumericalError if any stage is non-finite.
template <typename StateT, typename ActionT, typename Deriv>
StateT rk4_step(const Deriv& deriv, const StateT& s, const ActionT& a, double dt) {
  if (!(dt > 0.0)) {
    throw ConfigError("rk4_step: dt must be positive");
  }
  const StateT k1 = deriv(s, a);
  const StateT k2 = deriv(StateT(s + 0.5 * dt * k1), a);
  const StateT k3 = deriv(StateT(s + 0.5 * dt * k2), a);
  const StateT k4 = deriv(StateT(s + dt * k3), a);
  if (!k1.allFinite() || !k2.allFinite() || !k3.allFinite() || !k4.allFinite()) {
    throw NumericalError("rk4_step: non-finite intermediate stage");
  }
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Noise-free discrete map f(s, a): `substeps` RK4 steps over one sampling interval.
CartPoleState cartpole_discrete(const CartPoleState& s, double u, const CartPoleConfig& cfg);

class CartPoleEnv final : public EnvModel {
 public:
  explicit CartPoleEnv(CartPoleConfig cfg);

  const CartPoleConfig& config() const noexcept { return cfg_; }

  std::string name() const override { return "cartpole"; }
  int state_dim() const noexcept override { return 4; }
  int action_dim() const noexcept override { return 1; }
  int noise_dim() const noexcept override { return 4; }
  double discount() const noexcept override { return cfg_.gamma; }

  State sample_initial(Rng& rng) const override;
  Noise sample_noise(Rng& rng) const override;
  State transition(const State& s, const Action& a, const Noise& noise) const override;
  double stage_cost(const State& s, const Action& a) const override;
  void rollout_costs(const Policy& policy, const ParamVector& theta, const State& s,
                     std::span<const Action> first, std::span<const Noise> noise,
                     std::span<double> out) const override;

 private:
  CartPoleConfig cfg_;
  double noise_std_;
  double init_std_;
};

}  // namespace qnpg
