#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qnpg/errors.hpp"
#include "qnpg/linalg.hpp"
#include "qnpg/tensor.hpp"

using namespace qnpg;
using qnpg::oracle::Gen;

namespace {

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Tensor3, StorageIsSliceMajorRowMajorWithinSlice) {
  Tensor3 t(2, 3, 2);
  t(1, 2, 0) = 5.0;
  t(0, 1, 1) = 7.0;
  EXPECT_EQ(t.data()[0 * 6 + 1 * 3 + 2], 5.0);
  EXPECT_EQ(t.data()[1 * 6 + 0 * 3 + 1], 7.0);
}

TEST(Tensor3, OutOfRangeAccessThrows) {
  Tensor3 t(2, 2, 2);
  EXPECT_THROW(t(2, 0, 0), std::out_of_range);
  EXPECT_THROW(t(0, 2, 0), std::out_of_range);
  EXPECT_THROW(t(0, 0, 2), std::out_of_range);
  const Tensor3& ct = t;
  EXPECT_THROW(ct(5, 5, 5), std::out_of_range);
  EXPECT_THROW(ct.slice(2), std::out_of_range);
}

TEST(Tensor3, ZerosIsZero) {
  EXPECT_TRUE(Tensor3::zeros(3, 3, 2).is_zero());
}

TEST(TensorVecProduct, BasisVectorSelectsSlice) {
  Gen gen(11);
  const Tensor3 t = gen.tensor(3, 4, 3);
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(3, k);
    EXPECT_EQ(max_abs_diff(tensor_vec_product(t, e), t.slice(static_cast<std::size_t>(k))), 0.0);
  }
}

TEST(TensorVecProduct, ZeroVectorGivesZeroMatrix) {
  Gen gen(12);
  const Tensor3 t = gen.tensor(2, 5, 4);
  const Eigen::MatrixXd r = tensor_vec_product(t, Eigen::VectorXd::Zero(4));
  EXPECT_EQ(r.rows(), 2);
  EXPECT_EQ(r.cols(), 5);
  EXPECT_EQ(r.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TensorVecProduct, TwoSliceCombinationMatchesTripleLoop) {
  Gen gen(13);
  const Tensor3 t = gen.tensor(2, 3, 2);
  const Eigen::VectorXd v = (Eigen::VectorXd(2) << 2.0, -1.0).finished();
  const Eigen::MatrixXd r = tensor_vec_product(t, v);
  const Eigen::MatrixXd oracle = oracle::brute_tensor_vec(t, v);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(r(i, j), 2.0 * t(i, j, 0) - t(i, j, 1), 1e-15);
      EXPECT_NEAR(r(i, j), oracle(i, j), 1e-15);
    }
  }
}

TEST(TensorVecProduct, DimensionMismatchNamesBothSizes) {
  const Tensor3 t(2, 2, 3);
  try {
    tensor_vec_product(t, Eigen::VectorXd::Ones(4));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('3'), std::string::npos) << msg;
    EXPECT_NE(msg.find('4'), std::string::npos) << msg;
  }
}

TEST(TensorVecProduct, MatchesBruteForceOnRandomShapes) {
  Gen gen(14);
  for (int trial = 0; trial < 1000; ++trial) {
    const Tensor3 t = gen.tensor(static_cast<std::size_t>(gen.integer(1, 6)),
                                 static_cast<std::size_t>(gen.integer(1, 6)),
                                 static_cast<std::size_t>(gen.integer(1, 5)));
    const Eigen::VectorXd v = gen.vector(static_cast<int>(t.dim3()), -3.0, 3.0);
    ASSERT_LT(max_abs_diff(tensor_vec_product(t, v), oracle::brute_tensor_vec(t, v)), 1e-12)
        << "trial " << trial;
  }
}

TEST(TensorVecProduct, IsLinearInTheVector) {
  Gen gen(15);
  for (int trial = 0; trial < 200; ++trial) {
    const int n3 = gen.integer(1, 4);
    const Tensor3 t = gen.tensor(3, 2, static_cast<std::size_t>(n3));
    const Eigen::VectorXd u = gen.vector(n3);
    const Eigen::VectorXd w = gen.vector(n3);
    const double a = gen.uniform(-2, 2);
    const double b = gen.uniform(-2, 2);
    const Eigen::MatrixXd lhs = tensor_vec_product(t, a * u + b * w);
    const Eigen::MatrixXd rhs = a * tensor_vec_product(t, u) + b * tensor_vec_product(t, w);
    ASSERT_LT(max_abs_diff(lhs, rhs), 1e-12);
  }
}

TEST(SymMatrix, BuilderSymmetrizesExactly) {
  Gen gen(16);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(1, 6);
    const SymMatrix s(gen.matrix(n, n));
    EXPECT_EQ((s.matrix() - s.matrix().transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(SymMatrix, RejectsNonSquare) {
  EXPECT_THROW(SymMatrix(Eigen::MatrixXd::Zero(2, 3)), DimensionError);
}

TEST(SolveSpd, Identity) {
  const Eigen::VectorXd x = solve_spd(SymMatrix::identity(2), Eigen::Vector2d(3, -1));
  EXPECT_DOUBLE_EQ(x(0), 3.0);
  EXPECT_DOUBLE_EQ(x(1), -1.0);
}

TEST(SolveSpd, Diagonal) {
  const SymMatrix a((Eigen::Matrix2d() << 4, 0, 0, 2).finished());
  const Eigen::VectorXd x = solve_spd(a, Eigen::Vector2d(8, 2));
  EXPECT_DOUBLE_EQ(x(0), 2.0);
  EXPECT_DOUBLE_EQ(x(1), 1.0);
}

TEST(SolveSpd, NegativeScalarIsRejectedWithEigenvalue) {
  try {
    solve_spd(SymMatrix::scalar(-1.0), Eigen::VectorXd::Ones(1));
    FAIL() << "expected NotPositiveDefinite";
  } catch (const NotPositiveDefinite& e) {
    EXPECT_DOUBLE_EQ(e.smallest_eigenvalue(), -1.0);
  }
}

TEST(SolveSpd, IndefiniteMatrixIsRejected) {
  const SymMatrix a((Eigen::Matrix2d() << 1, 2, 2, 1).finished());
  EXPECT_THROW(solve_spd(a, Eigen::Vector2d(1, 1)), NotPositiveDefinite);
}

TEST(SolveSpd, DimensionMismatch) {
  EXPECT_THROW(solve_spd(SymMatrix::identity(3), Eigen::Vector2d(1, 1)), DimensionError);
}

TEST(SolveSpd, RecoversRandomSolutions) {
  Gen gen(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = gen.integer(1, 12);
    const Eigen::MatrixXd g = gen.matrix(n, n);
    const SymMatrix a(g.transpose() * g + Eigen::MatrixXd::Identity(n, n));
    const Eigen::VectorXd x = gen.vector(n, -5, 5);
    const Eigen::VectorXd b = a.matrix() * x;
    const Eigen::VectorXd got = solve_spd(a, b);
    ASSERT_LT((got - x).norm() / x.norm(), 1e-10);
    ASSERT_LE((a.matrix() * got - b).norm() / b.norm(), 1e-12);
  }
}

TEST(MinEigenvalue, KnownCases) {
  EXPECT_NEAR(min_eigenvalue(SymMatrix::identity(3)), 1.0, 1e-12);
  EXPECT_NEAR(min_eigenvalue(SymMatrix((Eigen::Matrix2d() << 0, 1, 1, 0).finished())), -1.0,
              1e-12);
  EXPECT_DOUBLE_EQ(min_eigenvalue(SymMatrix::scalar(-2.5)), -2.5);
}

TEST(MinEigenvalue, MatchesCharacteristicPolynomialOracle) {
  Gen gen(18);
  for (int trial = 0; trial < 200; ++trial) {
    const SymMatrix a(gen.matrix(4, 4, -2, 2));
    ASSERT_NEAR(min_eigenvalue(a), oracle::charpoly_min_eigenvalue(a.matrix()), 1e-8);
  }
  for (int trial = 0; trial < 200; ++trial) {
    const SymMatrix a(gen.matrix(2, 2, -2, 2));
    ASSERT_NEAR(min_eigenvalue(a), oracle::charpoly_min_eigenvalue(a.matrix()), 1e-10);
  }
}

TEST(MinEigenvalue, ShiftsWithIdentity) {
  Gen gen(19);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = gen.integer(1, 7);
    const SymMatrix a(gen.matrix(n, n, -3, 3));
    const double c = gen.uniform(-5, 5);
    const SymMatrix shifted = a + SymMatrix::identity(n) * c;
    ASSERT_NEAR(min_eigenvalue(shifted), min_eigenvalue(a) + c, 1e-8);
  }
}
