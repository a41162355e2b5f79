#include "qnpg/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "qnpg/errors.hpp"

namespace qnpg {

Tensor3::Tensor3(std::size_t n1, std::size_t n2, std::size_t n3)
    : n1_(n1), n2_(n2), n3_(n3), data_(n1 * n2 * n3, 0.0) {
  if (n1 == 0 || n2 == 0 || n3 == 0) {
    throw DimensionError("Tensor3 dimensions must be positive");
  }
}

std::size_t Tensor3::offset(std::size_t i, std::size_t j, std::size_t k) const {
  if (i >= n1_ || j >= n2_ || k >= n3_) {
    std::ostringstream msg;
    msg << "Tensor3 index (" << i << ", " << j << ", " << k << ") out of range for dims ("
        << n1_ << ", " << n2_ << ", " << n3_ << ")";
    throw std::out_of_range(msg.str());
  }
  return (k * n1_ + i) * n2_ + j;
}

double& Tensor3::operator()(std::size_t i, std::size_t j, std::size_t k) {
  return data_[offset(i, j, k)];
}

double Tensor3::operator()(std::size_t i, std::size_t j, std::size_t k) const {
  return data_[offset(i, j, k)];
}

Eigen::MatrixXd Tensor3::slice(std::size_t k) const {
  if (k >= n3_) {
    throw std::out_of_range("Tensor3 slice index out of range");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(data_.data() + k * n1_ * n2_,
                                    static_cast<Eigen::Index>(n1_),
                                    static_cast<Eigen::Index>(n2_));
}

void Tensor3::set_slice(std::size_t k, const Eigen::MatrixXd& m) {
  if (k >= n3_) {
    throw std::out_of_range("Tensor3 slice index out of range");
  }
  if (static_cast<std::size_t>(m.rows()) != n1_ || static_cast<std::size_t>(m.cols()) != n2_) {
    throw DimensionError("Tensor3::set_slice: slice shape mismatch");
  }
  for (std::size_t i = 0; i < n1_; ++i) {
    for (std::size_t j = 0; j < n2_; ++j) {
      data_[(k * n1_ + i) * n2_ + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
}

bool Tensor3::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return x == 0.0; });
}

Eigen::MatrixXd tensor_vec_product(const Tensor3& tensor, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != tensor.dim3()) {
    std::ostringstream msg;
    msg << "tensor_vec_product: vector length " << v.size()
        << " does not match tensor third dimension " << tensor.dim3();
    throw DimensionError(msg.str());
  }
  const auto n1 = tensor.dim1();
  const auto n2 = tensor.dim2();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n1),
                                              static_cast<Eigen::Index>(n2));
  const double* entries = tensor.data().data();
  for (std::size_t k = 0; k < tensor.dim3(); ++k) {
    const double vk = v(static_cast<Eigen::Index>(k));
    const double* slice = entries + k * n1 * n2;
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += vk * slice[i * n2 + j];
      }
    }
  }
  return out;
}

}  // namespace qnpg
