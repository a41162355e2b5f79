#include "qnpg/environment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

namespace qnpg {

namespace {

void check_rollout_spans(std::size_t first, std::size_t out) {
  if (first != out) {
    throw DimensionError("rollout_costs: " + std::to_string(first) + " first actions but " +
                         std::to_string(out) + " outputs");
  }
}

// Non-null when π_θ(s) = -Θ s with Θ of shape n_a x n_s.
const LinearPolicy* as_linear(const Policy& policy, int n_s, int n_a) {
  const auto* lin = dynamic_cast<const LinearPolicy*>(&policy);
  if (lin == nullptr || lin->state_dim() != n_s || lin->action_dim() != n_a) return nullptr;
  return lin;
}

}  // namespace

void EnvModel::rollout_costs_generic(const Policy& policy, const ParamVector& theta,
                                     const State& s, std::span<const Action> first,
                                     std::span<const Noise> noise, std::span<double> out) const {
  check_rollout_spans(first.size(), out.size());
  const std::size_t horizon = noise.size();
  const double gamma = discount();
  for (std::size_t p = 0; p < first.size(); ++p) {
    const Action& a = first[p];
    double total = stage_cost(s, a);
    if (horizon > 0) {
      State x = transition(s, a, noise[0]);
      double disc = gamma;
      for (std::size_t t = 1; t <= horizon; ++t) {
        const Action u = policy.evaluate(theta, x);
        total += disc * stage_cost(x, u);
        if (t < horizon) {
          x = transition(x, u, noise[t]);
          disc *= gamma;
        }
      }
    }
    out[p] = total;
  }
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

// ---- LQR ----

void LqrConfig::validate() const {
  if (!(sigma0_sq >= 0.0) || !(sigma_sq >= 0.0)) {
    throw ConfigError("LqrConfig: variances must be non-negative");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("LqrConfig: gamma must lie in (0, 1)");
  }
}

LqrEnv::LqrEnv(LqrConfig cfg)
    : cfg_(cfg), sigma0_(std::sqrt(cfg.sigma0_sq)), sigma_(std::sqrt(cfg.sigma_sq)) {
  cfg_.validate();
}

State LqrEnv::sample_initial(Rng& rng) const {
  State s(1);
  s(0) = sigma0_ * standard_normal(rng);
  return s;
}

Noise LqrEnv::sample_noise(Rng& rng) const {
  Noise w(1);
  w(0) = sigma_ * standard_normal(rng);
  return w;
}

State LqrEnv::transition(const State& s, const Action& a, const Noise& noise) const {
  State next(1);
  next(0) = lqr_step(s(0), a(0), noise(0));
  return next;
}

double LqrEnv::stage_cost(const State& s, const Action& a) const {
  return lqr_stage_cost(s(0), a(0));
}

void LqrEnv::rollout_costs(const Policy& policy, const ParamVector& theta, const State& s,
                           std::span<const Action> first, std::span<const Noise> noise,
                           std::span<double> out) const {
  if (as_linear(policy, 1, 1) == nullptr || theta.size() != 1 || s.size() != 1) {
    rollout_costs_generic(policy, theta, s, first, noise, out);
    return;
  }
  check_rollout_spans(first.size(), out.size());
  const std::size_t horizon = noise.size();
  const double gain = theta[0];
  const double gamma = cfg_.gamma;
  const double s0 = s(0);
  constexpr std::size_t kLanes = 8;
  for (std::size_t base = 0; base < first.size(); base += kLanes) {
    const std::size_t lanes = std::min(kLanes, first.size() - base);
    std::array<double, kLanes> x{};
    std::array<double, kLanes> total{};
    for (std::size_t p = 0; p < lanes; ++p) {
      const double a = first[base + p](0);
      total[p] = lqr_stage_cost(s0, a);
      if (horizon > 0) x[p] = lqr_step(s0, a, noise[0](0));
    }
    double disc = gamma;
    for (std::size_t t = 1; t <= horizon; ++t) {
      const double w = t < horizon ? noise[t](0) : 0.0;
      for (std::size_t p = 0; p < lanes; ++p) {
        const double u = -(gain * x[p]);
        total[p] += disc * lqr_stage_cost(x[p], u);
        x[p] = lqr_step(x[p], u, w);
      }
      disc *= gamma;
    }
    for (std::size_t p = 0; p < lanes; ++p) out[base + p] = total[p];
  }
}

// ---- Cart-pendulum ----

void CartPoleConfig::validate() const {
  if (!(cart_mass > 0.0) || !(pole_mass > 0.0) || !(pole_length > 0.0) || !(gravity > 0.0) ||
      !(dt > 0.0)) {
    throw ConfigError("CartPoleConfig: masses, length, gravity and dt must be positive");
  }
  if (substeps < 1) {
    throw ConfigError("CartPoleConfig: substeps must be at least 1");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("CartPoleConfig: gamma must lie in (0, 1)");
  }
  if (!(noise_var >= 0.0) || !(init_var >= 0.0) || !(action_cost >= 0.0)) {
    throw ConfigError("CartPoleConfig: variances and action cost must be non-negative");
  }
}

Eigen::Vector2d cartpole_accels(const CartPoleState& s, double u, const CartPoleConfig& cfg) {
  const double M = cfg.cart_mass;
  const double m = cfg.pole_mass;
  const double l = cfg.pole_length;
  const double phi_dot = s(2);
  const double phi = s(3);
  const double c = std::cos(phi);
  const double sn = std::sin(phi);

  const double a11 = M + m;
  const double a12 = 0.5 * m * l * c;
  const double a22 = m * l * l / 3.0;
  const double det = a11 * a22 - a12 * a12;
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    std::ostringstream msg;
    msg << "cartpole_accels: singular mass matrix (det = " << det << ")";
    throw NumericalError(msg.str());
  }
  const double rhs1 = 0.5 * m * l * phi_dot * phi_dot * sn + u;
  const double rhs2 = -0.5 * m * cfg.gravity * l * sn;
  return {(a22 * rhs1 - a12 * rhs2) / det, (a11 * rhs2 - a12 * rhs1) / det};
}

CartPoleState cartpole_derivative(const CartPoleState& s, double u, const CartPoleConfig& cfg) {
  const Eigen::Vector2d acc = cartpole_accels(s, u, cfg);
  return {acc(0), s(0), acc(1), s(2)};
}

double cartpole_energy(const CartPoleState& s, const CartPoleConfig& cfg) {
  const double M = cfg.cart_mass;
  const double m = cfg.pole_mass;
  const double l = cfg.pole_length;
  const double x_dot = s(0);
  const double phi_dot = s(2);
  const double c = std::cos(s(3));
  const double kinetic = 0.5 * (M + m) * x_dot * x_dot + 0.5 * m * l * x_dot * phi_dot * c +
                         m * l * l * phi_dot * phi_dot / 6.0;
  return kinetic - 0.5 * m * cfg.gravity * l * c;
}

CartPoleState cartpole_discrete(const CartPoleState& s, double u, const CartPoleConfig& cfg) {
  const auto deriv = [&cfg](const CartPoleState& x, double force) {
    return cartpole_derivative(x, force, cfg);
  };
  const double h = cfg.dt / cfg.substeps;
  CartPoleState x = s;
  for (int i = 0; i < cfg.substeps; ++i) x = rk4_step(deriv, x, u, h);
  return x;
}

CartPoleEnv::CartPoleEnv(CartPoleConfig cfg)
    : cfg_(cfg), noise_std_(std::sqrt(cfg.noise_var)), init_std_(std::sqrt(cfg.init_var)) {
  cfg_.validate();
}

State CartPoleEnv::sample_initial(Rng& rng) const {
  State s(4);
  for (int i = 0; i < 4; ++i) s(i) = init_std_ * standard_normal(rng);
  return s;
}

Noise CartPoleEnv::sample_noise(Rng& rng) const {
  Noise xi(4);
  for (int i = 0; i < 4; ++i) xi(i) = noise_std_ * standard_normal(rng);
  return xi;
}

State CartPoleEnv::transition(const State& s, const Action& a, const Noise& noise) const {
  const CartPoleState next = cartpole_discrete(CartPoleState(s), a(0), cfg_);
  State out(4);
  for (int i = 0; i < 4; ++i) out(i) = next(i) + noise(i);
  return out;
}

namespace {

double sum_of_squares(const double* v, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += v[i] * v[i];
  return acc;
}

}  // namespace

double CartPoleEnv::stage_cost(const State& s, const Action& a) const {
  return sum_of_squares(s.data(), static_cast<int>(s.size())) +
         cfg_.action_cost * sum_of_squares(a.data(), static_cast<int>(a.size()));
}

void CartPoleEnv::rollout_costs(const Policy& policy, const ParamVector& theta, const State& s,
                                std::span<const Action> first, std::span<const Noise> noise,
                                std::span<double> out) const {
  if (as_linear(policy, 4, 1) == nullptr || theta.size() != 4 || s.size() != 4) {
    rollout_costs_generic(policy, theta, s, first, noise, out);
    return;
  }
  check_rollout_spans(first.size(), out.size());
  const std::size_t horizon = noise.size();
  const double* gain = theta.values().data();
  const double gamma = cfg_.gamma;
  const CartPoleState s0 = s;
  const auto feedback = [gain](const CartPoleState& x) {
    double acc = 0.0;
    for (int c = 0; c < 4; ++c) acc += gain[c] * x(c);
    return -acc;
  };
  for (std::size_t p = 0; p < first.size(); ++p) {
    const double a = first[p](0);
    double total = sum_of_squares(s0.data(), 4) + cfg_.action_cost * (a * a);
    if (horizon > 0) {
      CartPoleState x = cartpole_discrete(s0, a, cfg_) + noise[0].head<4>();
      double disc = gamma;
      for (std::size_t t = 1; t <= horizon; ++t) {
        const double u = feedback(x);
        total += disc * (sum_of_squares(x.data(), 4) + cfg_.action_cost * (u * u));
        if (t < horizon) {
          x = cartpole_discrete(x, u, cfg_) + noise[t].head<4>();
          disc *= gamma;
        }
      }
    }
    out[p] = total;
  }
}

}  // namespace qnpg
