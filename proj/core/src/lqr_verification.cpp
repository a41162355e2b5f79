#include "qnpg/lqr_verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qnpg/lqr_oracle.hpp"

namespace qnpg::lqr {

namespace {

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
constexpr unsigned kMaxDepth = 15;
constexpr double kQuadTolerance = 1e-12;

// Thresholds of the suite.
constexpr double kIdentityRel = 1e-10;
constexpr double kHessianFdRel = 1e-5;
constexpr double kHessianFdStep = 1e-4;
constexpr double kGradientFdAbs = 1e-6;
constexpr double kGradientFdStep = 1e-5;
constexpr double kLambdaAtOptimum = 1e-10;
constexpr double kHessianAtOptimum = 1e-8;
constexpr double kPolicyGradientAbs = 1e-12;
constexpr double kBellmanRel = 1e-12;
constexpr double kLambdaQuadAbs = 1e-4;
constexpr double kGaussianMomentRel = 1e-8;

constexpr double kGridLo = 0.2;
constexpr double kGridHi = 1.5;
constexpr int kGridPoints = 50;

CheckResult make_check(std::string name, double value, double threshold, std::string detail = "") {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.threshold = threshold;
  c.passed = std::isfinite(value) && value < threshold;
  c.detail = std::move(detail);
  return c;
}

}  // namespace

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed || c.skipped; });
}

std::vector<std::string> VerificationReport::failed() const {
  std::vector<std::string> names;
  for (const auto& c : checks) {
    if (!c.passed && !c.skipped) names.push_back(c.name);
  }
  return names;
}

std::vector<double> theta_grid(double lo, double hi, int n) {
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  }
  return grid;
}

double fd_gradient(double theta, double h, const LqrConfig& cfg) {
  return (performance(theta + h, cfg) - performance(theta - h, cfg)) / (2.0 * h);
}

double fd_hessian(double theta, double h, const LqrConfig& cfg) {
  return (performance(theta + h, cfg) - 2.0 * performance(theta, cfg) +
          performance(theta - h, cfg)) /
         (h * h);
}

double gaussian_moment_quadrature(double a, double b, double c) {
  const double half_width = 40.0 / std::sqrt(c);
  const auto f = [a, b, c](double x) {
    const double d = x - b;
    return (x * x + a) * d * std::exp(-c * d * d);
  };
  return Quadrature::integrate(f, b - half_width, b + half_width, kMaxDepth, kQuadTolerance);
}

double gaussian_moment_closed_form(double b, double c) {
  return std::sqrt(std::numbers::pi) * b / std::pow(c, 1.5);
}

double lambda_state_term_quadrature(double s, double theta, const LqrConfig& cfg) {
  const double sigma = std::sqrt(cfg.sigma_sq);
  const double mean = (1.0 - theta) * s;
  const auto f = [&](double s_next) { return lambda_integrand(s_next, s, theta, cfg); };
  return Quadrature::integrate(f, mean - 12.0 * sigma, mean + 12.0 * sigma, kMaxDepth,
                               kQuadTolerance);
}

double lambda_by_quadrature(double theta, const LqrConfig& cfg) {
  if (!(cfg.sigma_sq > 0.0)) {
    throw ConfigError("lambda_by_quadrature: requires sigma_sq > 0");
  }
  if (!is_stable(theta, cfg)) {
    throw UnstableParameter("lambda_by_quadrature: unstable theta", theta,
                            stability_denominator(theta, cfg));
  }
  const double gain_sq = (1.0 - theta) * (1.0 - theta);
  double variance = cfg.sigma0_sq;
  double weight = 1.0;
  double total = 0.0;
  // Component t contributes γ^t ∫ term(s) N(s; 0, v_t) ds; stop once the
  // remaining mass γ^t v_t is negligible.
  for (int t = 0; t < 100000; ++t) {
    if (variance > 0.0) {
      const double sd = std::sqrt(variance);
      const auto f = [&](double s) {
        const double density =
            std::exp(-s * s / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
        return lambda_state_term_quadrature(s, theta, cfg) * density;
      };
      total += weight * Quadrature::integrate(f, -12.0 * sd, 12.0 * sd, kMaxDepth,
                                              kQuadTolerance);
    }
    weight *= cfg.gamma;
    variance = gain_sq * variance + cfg.sigma_sq;
    if (weight * variance < 1e-14) break;
  }
  return total;
}

VerificationReport verify_lqr(const LqrConfig& cfg) {
  cfg.validate();
  VerificationReport report;
  const auto grid = theta_grid(kGridLo, kGridHi, kGridPoints);

  {
    double worst = 0.0;
    for (const double t : grid) {
      const double exact = exact_hessian(t, cfg);
      const double split = approx_hessian_H(t, cfg) + cfg.gamma * lambda_term(t, cfg);
      worst = std::max(worst, std::abs(exact - split) / std::max(1.0, std::abs(exact)));
    }
    report.checks.push_back(make_check("hessian_identity", worst, kIdentityRel,
                                       "|J'' - (H + gamma*Lambda)| / max(1,|J''|) on 50-point grid"));
  }
  {
    double worst = 0.0;
    for (const double t : grid) {
      const double exact = exact_hessian(t, cfg);
      const double fd = fd_hessian(t, kHessianFdStep, cfg);
      worst = std::max(worst, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
    }
    report.checks.push_back(make_check("hessian_fd", worst, kHessianFdRel,
                                       "|J'' - FD2(J, h=1e-4)| / max(1,|J''|)"));
  }
  {
    double worst = 0.0;
    for (const double t : grid) {
      worst = std::max(worst, std::abs(gradient(t, cfg) - fd_gradient(t, kGradientFdStep, cfg)));
    }
    report.checks.push_back(
        make_check("gradient_fd", worst, kGradientFdAbs, "|J' - FD1(J, h=1e-5)|"));
  }

  const double t_star = theta_star(cfg);
  {
    std::ostringstream detail;
    detail.precision(10);
    detail << "theta* = " << t_star;
    report.checks.push_back(make_check("lambda_at_optimum", std::abs(lambda_term(t_star, cfg)),
                                       kLambdaAtOptimum, detail.str()));
    report.checks.push_back(make_check(
        "hessian_at_optimum",
        std::abs(approx_hessian_H(t_star, cfg) - exact_hessian(t_star, cfg)), kHessianAtOptimum,
        "|H(theta*) - J''(theta*)|"));
  }
  {
    // E_s[∇_θπ ∇_aQ] with ∇_θπ = -s and a = -θs is E_s[s²]·((1+2γp)θ - 2γp).
    double worst = 0.0;
    for (const double t : grid) {
      const double p = value_coeffs(t, cfg).p;
      const double pg =
          expected_s2(t, cfg) * ((1.0 + 2.0 * cfg.gamma * p) * t - 2.0 * cfg.gamma * p);
      worst = std::max(worst, std::abs(pg - gradient(t, cfg)));
    }
    report.checks.push_back(make_check("policy_gradient_consistency", worst, kPolicyGradientAbs,
                                       "|E_s[grad_theta pi * grad_a Q] - J'|"));
  }
  {
    double worst = 0.0;
    for (const double t : grid) {
      for (const double s : {-2.0, -0.3, 0.0, 0.7, 1.5}) {
        const double v = value(s, t, cfg);
        const double q = q_function(s, -t * s, t, cfg);
        worst = std::max(worst, std::abs(v - q) / std::max(1.0, std::abs(v)));
      }
    }
    report.checks.push_back(
        make_check("bellman_identity", worst, kBellmanRel, "|V(s) - Q(s, -theta s)|"));
  }
  {
    double worst = 0.0;
    for (const auto& [a, b, c] : {std::tuple{0.3, 0.5, 2.0}, std::tuple{1.0, -0.8, 0.7},
                                   std::tuple{0.05, 1.3, 5.0}}) {
      const double exact = gaussian_moment_closed_form(b, c);
      const double quad = gaussian_moment_quadrature(a, b, c);
      worst = std::max(worst, std::abs(quad - exact) / std::max(1e-12, std::abs(exact)));
    }
    report.checks.push_back(make_check("gaussian_moment_identity", worst, kGaussianMomentRel,
                                       "int (x^2+a)(x-b)exp(-c(x-b)^2) dx = sqrt(pi) b / c^1.5"));
  }
  if (cfg.sigma_sq > 0.0) {
    double worst = 0.0;
    for (const double t : {0.5, 1.2}) {
      worst = std::max(worst, std::abs(lambda_by_quadrature(t, cfg) - lambda_term(t, cfg)));
    }
    report.checks.push_back(make_check("lambda_quadrature", worst, kLambdaQuadAbs,
                                       "nested quadrature vs closed form at theta = 0.5, 1.2"));
  } else {
    CheckResult c;
    c.name = "lambda_quadrature";
    c.skipped = true;
    c.threshold = kLambdaQuadAbs;
    c.detail = "sigma_sq = 0: the transition kernel is degenerate";
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace qnpg::lqr
