#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qnpg/errors.hpp"
#include "qnpg/policy.hpp"

using namespace qnpg;
using qnpg::oracle::Gen;

namespace {

State state_of(std::initializer_list<double> v) {
  State s(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) s(i++) = x;
  return s;
}

State random_state(Gen& gen, int n) {
  State s(n);
  for (int i = 0; i < n; ++i) s(i) = gen.uniform(-1.5, 1.5);
  return s;
}

std::vector<std::unique_ptr<Policy>> shipped_policies() {
  std::vector<std::unique_ptr<Policy>> out;
  out.push_back(std::make_unique<LinearPolicy>(1, 1));
  out.push_back(std::make_unique<LinearPolicy>(4, 1));
  out.push_back(std::make_unique<LinearPolicy>(3, 2));
  out.push_back(std::make_unique<PolynomialFeaturePolicy>(1, 2));
  out.push_back(std::make_unique<PolynomialFeaturePolicy>(2, 3));
  out.push_back(std::make_unique<BilinearPolicy>());
  return out;
}

}  // namespace

TEST(ParamVector, RejectsNonFiniteEntries) {
  EXPECT_THROW(ParamVector({1.0, std::nan("")}), NumericalError);
  EXPECT_THROW(ParamVector(Eigen::VectorXd::Constant(2, INFINITY)), NumericalError);
  EXPECT_NO_THROW(ParamVector({0.0, -3.0}));
}

TEST(LinearPolicy, ScalarGain) {
  const LinearPolicy p(1, 1);
  EXPECT_DOUBLE_EQ(p.evaluate(ParamVector{1.0}, state_of({0.5}))(0), -0.5);
}

TEST(LinearPolicy, ZeroGainGivesZeroAction) {
  const LinearPolicy p(4, 1);
  Gen gen(1);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(p.evaluate(ParamVector{0, 0, 0, 0}, random_state(gen, 4))(0), 0.0);
  }
}

TEST(LinearPolicy, RowMajorLayout) {
  const LinearPolicy p(2, 2);
  // Θ = [[1, 2], [3, 4]]
  const Action a = p.evaluate(ParamVector{1, 2, 3, 4}, state_of({1.0, 10.0}));
  EXPECT_DOUBLE_EQ(a(0), -21.0);
  EXPECT_DOUBLE_EQ(a(1), -43.0);
}

TEST(LinearPolicy, ScalarJacobianIsMinusState) {
  const LinearPolicy p(1, 1);
  const Eigen::MatrixXd j = p.jacobian(ParamVector{0.3}, state_of({0.7}));
  ASSERT_EQ(j.rows(), 1);
  ASSERT_EQ(j.cols(), 1);
  EXPECT_DOUBLE_EQ(j(0, 0), -0.7);
}

TEST(LinearPolicy, JacobianAtZeroStateIsZero) {
  const LinearPolicy p(3, 2);
  const Eigen::MatrixXd j = p.jacobian(ParamVector{1, 2, 3, 4, 5, 6}, state_of({0, 0, 0}));
  EXPECT_EQ(j.rows(), 6);
  EXPECT_EQ(j.cols(), 2);
  EXPECT_EQ(j.cwiseAbs().maxCoeff(), 0.0);
}

TEST(LinearPolicy, HessianIsZeroTensor) {
  Gen gen(2);
  const LinearPolicy p(4, 1);
  for (int i = 0; i < 20; ++i) {
    const Tensor3 h = p.param_hessian(ParamVector(gen.vector(4)), random_state(gen, 4));
    EXPECT_EQ(h.dim1(), 4u);
    EXPECT_EQ(h.dim2(), 4u);
    EXPECT_EQ(h.dim3(), 1u);
    EXPECT_TRUE(h.is_zero());
  }
}

TEST(LinearPolicy, DimensionMismatchThrows) {
  const LinearPolicy p(2, 1);
  EXPECT_THROW(p.evaluate(ParamVector{1.0}, state_of({1, 2})), DimensionError);
  EXPECT_THROW(p.evaluate(ParamVector{1.0, 2.0}, state_of({1})), DimensionError);
  EXPECT_THROW(p.jacobian(ParamVector{1.0, 2.0, 3.0}, state_of({1, 2})), DimensionError);
  EXPECT_THROW(p.param_hessian(ParamVector{1.0}, state_of({1, 2})), DimensionError);
}

TEST(PolynomialFeaturePolicy, QuadraticFeatureHandEvaluation) {
  const PolynomialFeaturePolicy p(1, 2);
  EXPECT_DOUBLE_EQ(p.evaluate(ParamVector{1.0, 2.0}, state_of({0.5}))(0), -1.0);
}

TEST(PolynomialFeaturePolicy, FeatureLayout) {
  const PolynomialFeaturePolicy p(2, 3);
  const Eigen::VectorXd phi = p.features(state_of({2.0, -1.0}));
  ASSERT_EQ(phi.size(), 6);
  EXPECT_DOUBLE_EQ(phi(0), 2.0);
  EXPECT_DOUBLE_EQ(phi(1), 4.0);
  EXPECT_DOUBLE_EQ(phi(2), 8.0);
  EXPECT_DOUBLE_EQ(phi(3), -1.0);
  EXPECT_DOUBLE_EQ(phi(4), 1.0);
  EXPECT_DOUBLE_EQ(phi(5), -1.0);
}

TEST(BilinearPolicy, HessianHasMinusStateOffDiagonal) {
  const BilinearPolicy p;
  const Tensor3 h = p.param_hessian(ParamVector{0.4, -1.3}, state_of({0.9}));
  EXPECT_EQ(h(0, 0, 0), 0.0);
  EXPECT_EQ(h(1, 1, 0), 0.0);
  EXPECT_DOUBLE_EQ(h(0, 1, 0), -0.9);
  EXPECT_DOUBLE_EQ(h(1, 0, 0), -0.9);
}

TEST(BilinearPolicy, Evaluate) {
  const BilinearPolicy p;
  EXPECT_DOUBLE_EQ(p.evaluate(ParamVector{2.0, 3.0}, state_of({0.5}))(0), -3.0);
}

TEST(PolicyProperties, JacobianMatchesFiniteDifferences) {
  Gen gen(3);
  for (const auto& policy : shipped_policies()) {
    for (int trial = 0; trial < 100; ++trial) {
      const ParamVector theta(gen.vector(policy->param_dim(), -2, 2));
      const State s = random_state(gen, policy->state_dim());
      const Eigen::MatrixXd analytic = policy->jacobian(theta, s);
      const Eigen::MatrixXd fd = oracle::fd_policy_jacobian(*policy, theta, s, 1e-6);
      ASSERT_EQ(analytic.rows(), policy->param_dim());
      ASSERT_EQ(analytic.cols(), policy->action_dim());
      ASSERT_LT((analytic - fd).cwiseAbs().maxCoeff(), 1e-6)
          << policy->name() << " trial " << trial;
    }
  }
}

TEST(PolicyProperties, HessianMatchesFiniteDifferencesAndIsSymmetric) {
  Gen gen(4);
  for (const auto& policy : shipped_policies()) {
    for (int trial = 0; trial < 100; ++trial) {
      const ParamVector theta(gen.vector(policy->param_dim(), -2, 2));
      const State s = random_state(gen, policy->state_dim());
      const Tensor3 analytic = policy->param_hessian(theta, s);
      const Tensor3 fd = oracle::fd_policy_hessian(*policy, theta, s, 1e-3);
      const auto n = static_cast<std::size_t>(policy->param_dim());
      for (std::size_t k = 0; k < static_cast<std::size_t>(policy->action_dim()); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            ASSERT_EQ(analytic(i, j, k), analytic(j, i, k));
            ASSERT_LT(std::abs(analytic(i, j, k) - fd(i, j, k)), 1e-4)
                << policy->name() << " (" << i << "," << j << "," << k << ")";
          }
        }
      }
    }
  }
}
