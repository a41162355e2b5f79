#pragma once

// Numerical tolerances used across the library. Kept in one place so that
// tests and the command-line checks agree on every threshold.

namespace qnpg::tol {

// Relative residual target for solve_spd.
inline constexpr double kSolveResidual = 1e-12;

// Absolute accuracy of min_eigenvalue.
inline constexpr double kEigenvalue = 1e-10;

// A matrix counts as positive definite when its smallest eigenvalue exceeds
// this value.
inline constexpr double kPositiveDefinite = 1e-12;

// LQR stability guard: D = 1 - gamma (1 - theta)^2 must exceed this.
inline constexpr double kStabilityMargin = 1e-9;

// theta_star bisection width.
inline constexpr double kThetaStarBisection = 1e-12;

// Width of the beta bracket left by regularize().
inline constexpr double kBetaBisection = 1e-6;

// Gradient-norm stopping threshold for learning with oracle curvature.
inline constexpr double kOracleGradientStop = 1e-10;

// Superlinear diagnostic: final error ratio must fall below this.
inline constexpr double kSuperlinearRatio = 0.1;

}  // namespace qnpg::tol
