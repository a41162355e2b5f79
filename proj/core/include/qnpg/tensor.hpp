#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qnpg {

/// Dense rank-3 tensor of shape (n1, n2, n3).
///
/// Storage is slice-major: the frontal slice index k is outermost and each
/// slice T(:,:,k) is stored row-major, so entry (i, j, k) lives at
/// `k * n1 * n2 + i * n2 + j`. Serialized dumps follow the same order.
/// Every element access is bounds-checked and throws std::out_of_range.
class Tensor3 {
 public:
  Tensor3(std::size_t n1, std::size_t n2, std::size_t n3);

  static Tensor3 zeros(std::size_t n1, std::size_t n2, std::size_t n3) {
    return Tensor3(n1, n2, n3);
  }

  std::size_t dim1() const noexcept { return n1_; }
  std::size_t dim2() const noexcept { return n2_; }
  std::size_t dim3() const noexcept { return n3_; }

  double& operator()(std::size_t i, std::size_t j, std::size_t k);
  double operator()(std::size_t i, std::size_t j, std::size_t k) const;

  /// Frontal slice T(:,:,k) as an n1 x n2 matrix.
  Eigen::MatrixXd slice(std::size_t k) const;
  void set_slice(std::size_t k, const Eigen::MatrixXd& m);

  /// Raw entries in canonical order.
  const std::vector<double>& data() const noexcept { return data_; }

  bool is_zero() const noexcept;

 private:
  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const;

  std::size_t n1_;
  std::size_t n2_;
  std::size_t n3_;
  std::vector<double> data_;
};

/// T ⊗ v = Σ_k v(k) T(:,:,k). Throws DimensionError unless v.size() == n3.
Eigen::MatrixXd tensor_vec_product(const Tensor3& tensor, const Eigen::VectorXd& v);

}  // namespace qnpg
