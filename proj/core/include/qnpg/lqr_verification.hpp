#pragma once

#include <string>
#include <vector>

#include "qnpg/environment.hpp"

namespace qnpg::lqr {

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  double value = 0.0;      // worst observed deviation
  double threshold = 0.0;  // pass iff value < threshold
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::vector<std::string> failed() const;
};

/// Evenly spaced grid of n points on [lo, hi].
std::vector<double> theta_grid(double lo, double hi, int n);

/// Central first difference of J with step h.
double fd_gradient(double theta, double h, const LqrConfig& cfg);

/// Central second difference of J with step h.
double fd_hessian(double theta, double h, const LqrConfig& cfg);

/// ∫ (x² + a)(x - b) exp(-c (x - b)²) dx over the real line, by adaptive
/// Gauss-Kronrod quadrature.
double gaussian_moment_quadrature(double a, double b, double c);

/// √π b / c^{3/2}.
double gaussian_moment_closed_form(double b, double c);

/// 2 ∫ ∇_θV(s') ∇_θp(s'|s, -θs) ds' for one state s, by quadrature.
double lambda_state_term_quadrature(double s, double theta, const LqrConfig& cfg);

/// Λ(θ) by nested quadrature: the per-state term integrated against the
/// discounted visitation density Σ_t γ^t N(s; 0, v_t), v_0 = σ0²,
/// v_{t+1} = (1-θ)² v_t + σ². Requires σ² > 0.
double lambda_by_quadrature(double theta, const LqrConfig& cfg);

/// The closed-form consistency suite on one configuration: the Hessian
/// decomposition on a 50-point grid, the optimum checks at θ*, finite
/// difference cross-checks, the Bellman and policy-gradient identities and
/// the quadrature check of Λ.
VerificationReport verify_lqr(const LqrConfig& cfg);

}  // namespace qnpg::lqr
