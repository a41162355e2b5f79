#include "qnpg/linalg.hpp"

#include <cmath>
#include <sstream>

#include "qnpg/errors.hpp"
#include "qnpg/tolerances.hpp"

namespace qnpg {

SymMatrix::SymMatrix(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << "SymMatrix: input is " << a.rows() << "x" << a.cols() << ", not square";
    throw DimensionError(msg.str());
  }
  m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index n) {
  return SymMatrix(Eigen::MatrixXd::Identity(n, n));
}

SymMatrix SymMatrix::zeros(Eigen::Index n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }

SymMatrix SymMatrix::scalar(double value) {
  return SymMatrix(Eigen::MatrixXd::Constant(1, 1, value));
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
  if (other.size() != size()) {
    throw DimensionError("SymMatrix addition: size mismatch");
  }
  return SymMatrix(m_ + other.m_);
}

SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(m_ * s); }

Eigen::VectorXd solve_spd(const SymMatrix& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << "solve_spd: matrix is " << a.size() << "x" << a.size() << " but rhs has length "
        << b.size();
    throw DimensionError(msg.str());
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a.matrix());
  if (llt.info() != Eigen::Success) {
    const double lambda_min = min_eigenvalue(a);
    std::ostringstream msg;
    msg << "solve_spd: matrix is not positive definite (smallest eigenvalue " << lambda_min << ")";
    throw NotPositiveDefinite(msg.str(), lambda_min);
  }
  Eigen::VectorXd x = llt.solve(b);
  // One step of iterative refinement keeps the residual near round-off.
  const Eigen::VectorXd r = b - a.matrix() * x;
  x += llt.solve(r);
  return x;
}

double min_eigenvalue(const SymMatrix& a) {
  const auto n = a.size();
  if (n == 0) {
    throw DimensionError("min_eigenvalue: empty matrix");
  }
  if (n == 1) {
    return a(0, 0);
  }
  if (n == 2) {
    const double mean = 0.5 * (a(0, 0) + a(1, 1));
    const double half_diff = 0.5 * (a(0, 0) - a(1, 1));
    return mean - std::hypot(half_diff, a(0, 1));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace qnpg
