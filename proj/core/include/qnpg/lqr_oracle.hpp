#pragma once

#include "qnpg/environment.hpp"

namespace qnpg::lqr {

// Closed-form ground truth for the scalar LQR s+ = s + a + w under the
// policy a = -θ s. Throughout, D = 1 - γ(1-θ)² and C = σ0² + γσ²/(1-γ).
// Every function throws UnstableParameter when D <= tol::kStabilityMargin.
//
// Expectations over states use the unnormalized discounted visitation
// Σ_t γ^t E[·(s_t)], which is what makes E_s[s²] = C/D.

struct ValueCoeffs {
  double p;  // V(s) = p s² + q
  double q;
};

struct Curvature {
  double J;
  double dJ;
  double d2J_exact;
  double H;
  double lambda;
  double fisher;
  double expected_s2;
};

double stability_denominator(double theta, const LqrConfig& cfg);
double cost_scale(const LqrConfig& cfg);
bool is_stable(double theta, const LqrConfig& cfg);

ValueCoeffs value_coeffs(double theta, const LqrConfig& cfg);
double value(double s, double theta, const LqrConfig& cfg);
double q_function(double s, double a, double theta, const LqrConfig& cfg);

/// ∇_a Q and ∇²_a Q at (s, a).
double q_action_gradient(double s, double a, double theta, const LqrConfig& cfg);
double q_action_hessian(double theta, const LqrConfig& cfg);

double performance(double theta, const LqrConfig& cfg);
double gradient(double theta, const LqrConfig& cfg);

/// J''(θ) = p''_θ C with p'' from differentiating p = ½(1+θ²)/D twice.
double exact_hessian(double theta, const LqrConfig& cfg);

/// H(θ) = (1 + 2γθ)/D² · C.
double approx_hessian_H(double theta, const LqrConfig& cfg);

/// Λ(θ) = -4(γθ² + θ - γ)(1 - θ)/D³ · C.
double lambda_term(double theta, const LqrConfig& cfg);

/// Integrand of the per-state transition-gradient term
///   2 ∫ ∇_θV(s') ∇_θp(s' | s, -θs) ds'
/// evaluated at s'. Requires σ² > 0.
double lambda_integrand(double s_next, double s, double theta, const LqrConfig& cfg);

double expected_s2(double theta, const LqrConfig& cfg);
double fisher(double theta, const LqrConfig& cfg);

/// Positive root of γθ² + θ - γ, by bisection on [0, 1].
double theta_star(const LqrConfig& cfg);

Curvature curvature(double theta, const LqrConfig& cfg);

}  // namespace qnpg::lqr
