#include "qnpg/lqr_oracle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qnpg/tolerances.hpp"

namespace qnpg::lqr {

namespace {

// Checked D; also validates the config.
double guarded_denominator(double theta, const LqrConfig& cfg) {
  cfg.validate();
  const double d = stability_denominator(theta, cfg);
  if (!(d > tol::kStabilityMargin)) {
    std::ostringstream msg;
    msg << "theta = " << theta << " is outside the LQR stability domain (D = " << d << ")";
    throw UnstableParameter(msg.str(), theta, d);
  }
  return d;
}

// p'_θ = (γθ² + θ - γ)/D².
double p_prime(double theta, double d, const LqrConfig& cfg) {
  return (cfg.gamma * theta * theta + theta - cfg.gamma) / (d * d);
}

}  // namespace

double stability_denominator(double theta, const LqrConfig& cfg) {
  const double gain = 1.0 - theta;
  return 1.0 - cfg.gamma * gain * gain;
}

double cost_scale(const LqrConfig& cfg) {
  return cfg.sigma0_sq + cfg.gamma * cfg.sigma_sq / (1.0 - cfg.gamma);
}

bool is_stable(double theta, const LqrConfig& cfg) {
  return stability_denominator(theta, cfg) > tol::kStabilityMargin;
}

ValueCoeffs value_coeffs(double theta, const LqrConfig& cfg) {
  const double d = guarded_denominator(theta, cfg);
  const double p = 0.5 * (1.0 + theta * theta) / d;
  return {p, cfg.gamma * cfg.sigma_sq * p / (1.0 - cfg.gamma)};
}

double value(double s, double theta, const LqrConfig& cfg) {
  const auto [p, q] = value_coeffs(theta, cfg);
  return p * s * s + q;
}

double q_function(double s, double a, double theta, const LqrConfig& cfg) {
  const auto [p, q] = value_coeffs(theta, cfg);
  const double diag = 0.5 + cfg.gamma * p;
  return diag * s * s + 2.0 * cfg.gamma * p * s * a + diag * a * a + q;
}

double q_action_gradient(double s, double a, double theta, const LqrConfig& cfg) {
  const double p = value_coeffs(theta, cfg).p;
  return 2.0 * cfg.gamma * p * s + (1.0 + 2.0 * cfg.gamma * p) * a;
}

double q_action_hessian(double theta, const LqrConfig& cfg) {
  return 1.0 + 2.0 * cfg.gamma * value_coeffs(theta, cfg).p;
}

double performance(double theta, const LqrConfig& cfg) {
  return value_coeffs(theta, cfg).p * cost_scale(cfg);
}

double gradient(double theta, const LqrConfig& cfg) {
  const double d = guarded_denominator(theta, cfg);
  return p_prime(theta, d, cfg) * cost_scale(cfg);
}

double exact_hessian(double theta, const LqrConfig& cfg) {
  const double d = guarded_denominator(theta, cfg);
  const double g = cfg.gamma;
  const double t = theta;
  const double numerator =
      2.0 * g * g * t * t * t + 3.0 * g * t * t - 6.0 * g * g * t + 4.0 * g * g - g + 1.0;
  return numerator / (d * d * d) * cost_scale(cfg);
}

double approx_hessian_H(double theta, const LqrConfig& cfg) {
  const double d = guarded_denominator(theta, cfg);
  return (1.0 + 2.0 * cfg.gamma * theta) / (d * d) * cost_scale(cfg);
}

double lambda_term(double theta, const LqrConfig& cfg) {
  const double d = guarded_denominator(theta, cfg);
  const double g = cfg.gamma;
  return -4.0 * (g * theta * theta + theta - g) * (1.0 - theta) / (d * d * d) * cost_scale(cfg);
}

double lambda_integrand(double s_next, double s, double theta, const LqrConfig& cfg) {
  const double d = guarded_denominator(theta, cfg);
  if (!(cfg.sigma_sq > 0.0)) {
    throw ConfigError("lambda_integrand: requires sigma_sq > 0");
  }
  const double dp = p_prime(theta, d, cfg);
  const double dq = cfg.gamma * cfg.sigma_sq * dp / (1.0 - cfg.gamma);
  const double grad_value = dp * s_next * s_next + dq;

  // p(s'|s,a) = N(s'; s + a, σ²) with a = -θs, so
  // ∇_θ p = ∂_a p · ∂a/∂θ = (s' - s - a)/σ² · p · (-s).
  const double mean = s - theta * s;
  const double resid = s_next - mean;
  const double density = std::exp(-resid * resid / (2.0 * cfg.sigma_sq)) /
                         std::sqrt(2.0 * std::numbers::pi * cfg.sigma_sq);
  const double grad_density = resid / cfg.sigma_sq * density * (-s);
  return 2.0 * grad_value * grad_density;
}

double expected_s2(double theta, const LqrConfig& cfg) {
  return cost_scale(cfg) / guarded_denominator(theta, cfg);
}

double fisher(double theta, const LqrConfig& cfg) {
  // ∇_θπ = -s, so F = E_s[s²].
  return expected_s2(theta, cfg);
}

double theta_star(const LqrConfig& cfg) {
  cfg.validate();
  const double g = cfg.gamma;
  const auto stationarity = [g](double t) { return g * t * t + t - g; };
  double lo = 0.0;  // stationarity(0) = -γ < 0
  double hi = 1.0;  // stationarity(1) = 1 > 0
  // Runs past tol::kThetaStarBisection until the bracket stops shrinking.
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (stationarity(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Curvature curvature(double theta, const LqrConfig& cfg) {
  return {performance(theta, cfg),       gradient(theta, cfg),   exact_hessian(theta, cfg),
          approx_hessian_H(theta, cfg),  lambda_term(theta, cfg), fisher(theta, cfg),
          expected_s2(theta, cfg)};
}

}  // namespace qnpg::lqr
