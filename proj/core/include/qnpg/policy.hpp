#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

#include "qnpg/tensor.hpp"
#include "qnpg/types.hpp"

namespace qnpg {

/// Deterministic policy a = π_θ(s) with closed-form parameter derivatives.
///
/// jacobian() returns ∇_θπ with shape (n_θ, n_a): column r is the gradient of
/// action component r. param_hessian() returns ∇²_θπ as a Tensor3 of dims
/// (n_θ, n_θ, n_a), symmetric in its first two indices.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const noexcept = 0;
  virtual int action_dim() const noexcept = 0;
  virtual int param_dim() const noexcept = 0;

  virtual Action evaluate(const ParamVector& theta, const State& s) const = 0;
  virtual Eigen::MatrixXd jacobian(const ParamVector& theta, const State& s) const = 0;
  virtual Tensor3 param_hessian(const ParamVector& theta, const State& s) const = 0;

 protected:
  void check_dims(const ParamVector& theta, const State& s) const;
};

/// π_θ(s) = -Θ s with Θ the n_a x n_s gain, θ = vec(Θ) row-major:
/// θ[r * n_s + c] = Θ(r, c).
class LinearPolicy final : public Policy {
 public:
  LinearPolicy(int state_dim, int action_dim);

  std::string name() const override { return "linear"; }
  int state_dim() const noexcept override { return n_s_; }
  int action_dim() const noexcept override { return n_a_; }
  int param_dim() const noexcept override { return n_s_ * n_a_; }

  Action evaluate(const ParamVector& theta, const State& s) const override;
  Eigen::MatrixXd jacobian(const ParamVector& theta, const State& s) const override;
  Tensor3 param_hessian(const ParamVector& theta, const State& s) const override;

 private:
  int n_s_;
  int n_a_;
};

/// Scalar-action policy on polynomial state features,
/// π_θ(s) = -θᵀφ(s) with φ(s) = (s_1, s_1², …, s_1^d, s_2, …, s_n^d).
/// θ[c * d + (p - 1)] multiplies s_c^p.
class PolynomialFeaturePolicy final : public Policy {
 public:
  PolynomialFeaturePolicy(int state_dim, int degree);

  std::string name() const override { return "polynomial"; }
  int state_dim() const noexcept override { return n_s_; }
  int action_dim() const noexcept override { return 1; }
  int param_dim() const noexcept override { return n_s_ * degree_; }

  Eigen::VectorXd features(const State& s) const;

  Action evaluate(const ParamVector& theta, const State& s) const override;
  Eigen::MatrixXd jacobian(const ParamVector& theta, const State& s) const override;
  Tensor3 param_hessian(const ParamVector& theta, const State& s) const override;

 private:
  int n_s_;
  int degree_;
};

/// Scalar policy a = -θ₁θ₂ s. Nonlinear in θ, so its parameter Hessian is the
/// constant-in-θ slice [[0, -s], [-s, 0]].
class BilinearPolicy final : public Policy {
 public:
  std::string name() const override { return "bilinear"; }
  int state_dim() const noexcept override { return 1; }
  int action_dim() const noexcept override { return 1; }
  int param_dim() const noexcept override { return 2; }

  Action evaluate(const ParamVector& theta, const State& s) const override;
  Eigen::MatrixXd jacobian(const ParamVector& theta, const State& s) const override;
  Tensor3 param_hessian(const ParamVector& theta, const State& s) const override;
};

}  // namespace qnpg
