#pragma once

#include <Eigen/Dense>

namespace qnpg {

/// Real symmetric matrix. Construction symmetrizes its input as (A + Aᵀ)/2,
/// so the stored entries are exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& a);

  static SymMatrix identity(Eigen::Index n);
  static SymMatrix zeros(Eigen::Index n);
  static SymMatrix scalar(double value);

  Eigen::Index size() const noexcept { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

  SymMatrix operator+(const SymMatrix& other) const;
  SymMatrix operator*(double s) const;

 private:
  Eigen::MatrixXd m_;
};

/// Solves A x = b for symmetric positive-definite A via Cholesky.
/// Throws NotPositiveDefinite (with the smallest eigenvalue of A) when the
/// factorization fails, and DimensionError on a size mismatch.
Eigen::VectorXd solve_spd(const SymMatrix& a, const Eigen::VectorXd& b);

/// Smallest eigenvalue. Closed form for n <= 2, self-adjoint eigensolver
/// otherwise; accurate to tol::kEigenvalue for well-scaled input.
double min_eigenvalue(const SymMatrix& a);

}  // namespace qnpg
