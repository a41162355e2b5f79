#include "qnpg/policy.hpp"

#include <cmath>
#include <sstream>

#include "qnpg/errors.hpp"

namespace qnpg {

ParamVector::ParamVector(Eigen::VectorXd values) : values_(std::move(values)) {
  if (!values_.allFinite()) {
    throw NumericalError("ParamVector: non-finite entry");
  }
}

ParamVector::ParamVector(std::initializer_list<double> values)
    : ParamVector(Eigen::VectorXd::Map(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

void Policy::check_dims(const ParamVector& theta, const State& s) const {
  if (theta.size() != param_dim() || s.size() != state_dim()) {
    std::ostringstream msg;
    msg << name() << " policy: expected theta of length " << param_dim() << " and state of length "
        << state_dim() << ", got " << theta.size() << " and " << s.size();
    throw DimensionError(msg.str());
  }
}

// ---- LinearPolicy ----

LinearPolicy::LinearPolicy(int state_dim, int action_dim) : n_s_(state_dim), n_a_(action_dim) {
  if (state_dim <= 0 || action_dim <= 0 || state_dim > kMaxSmallDim || action_dim > kMaxSmallDim) {
    throw DimensionError("LinearPolicy: dimensions must lie in [1, kMaxSmallDim]");
  }
}

Action LinearPolicy::evaluate(const ParamVector& theta, const State& s) const {
  check_dims(theta, s);
  Action a(n_a_);
  const double* gain = theta.values().data();
  for (int r = 0; r < n_a_; ++r) {
    double acc = 0.0;
    for (int c = 0; c < n_s_; ++c) acc += gain[r * n_s_ + c] * s(c);
    a(r) = -acc;
  }
  return a;
}

Eigen::MatrixXd LinearPolicy::jacobian(const ParamVector& theta, const State& s) const {
  check_dims(theta, s);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(param_dim(), n_a_);
  for (int r = 0; r < n_a_; ++r) {
    for (int c = 0; c < n_s_; ++c) jac(r * n_s_ + c, r) = -s(c);
  }
  return jac;
}

Tensor3 LinearPolicy::param_hessian(const ParamVector& theta, const State& s) const {
  check_dims(theta, s);
  return Tensor3::zeros(param_dim(), param_dim(), n_a_);
}

// ---- PolynomialFeaturePolicy ----

PolynomialFeaturePolicy::PolynomialFeaturePolicy(int state_dim, int degree)
    : n_s_(state_dim), degree_(degree) {
  if (state_dim <= 0 || state_dim > kMaxSmallDim || degree <= 0) {
    throw DimensionError("PolynomialFeaturePolicy: invalid state dimension or degree");
  }
}

Eigen::VectorXd PolynomialFeaturePolicy::features(const State& s) const {
  Eigen::VectorXd phi(param_dim());
  for (int c = 0; c < n_s_; ++c) {
    double power = 1.0;
    for (int p = 0; p < degree_; ++p) {
      power *= s(c);
      phi(c * degree_ + p) = power;
    }
  }
  return phi;
}

Action PolynomialFeaturePolicy::evaluate(const ParamVector& theta, const State& s) const {
  check_dims(theta, s);
  Action a(1);
  a(0) = -theta.values().dot(features(s));
  return a;
}

Eigen::MatrixXd PolynomialFeaturePolicy::jacobian(const ParamVector& theta, const State& s) const {
  check_dims(theta, s);
  return -features(s);
}

Tensor3 PolynomialFeaturePolicy::param_hessian(const ParamVector& theta, const State& s) const {
  check_dims(theta, s);
  return Tensor3::zeros(param_dim(), param_dim(), 1);
}

// ---- BilinearPolicy ----

Action BilinearPolicy::evaluate(const ParamVector& theta, const State& s) const {
  check_dims(theta, s);
  Action a(1);
  a(0) = -theta[0] * theta[1] * s(0);
  return a;
}

Eigen::MatrixXd BilinearPolicy::jacobian(const ParamVector& theta, const State& s) const {
  check_dims(theta, s);
  Eigen::MatrixXd jac(2, 1);
  jac(0, 0) = -theta[1] * s(0);
  jac(1, 0) = -theta[0] * s(0);
  return jac;
}

Tensor3 BilinearPolicy::param_hessian(const ParamVector& theta, const State& s) const {
  check_dims(theta, s);
  Tensor3 hess(2, 2, 1);
  hess(0, 1, 0) = -s(0);
  hess(1, 0, 0) = -s(0);
  return hess;
}

}  // namespace qnpg
