#pragma once

#include <Eigen/Dense>

namespace qnpg {

// States, actions and per-step noise are short vectors; a fixed capacity
// keeps them off the heap inside rollout loops.
inline constexpr int kMaxSmallDim = 8;

using SmallVector =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxSmallDim, 1>;
using State = SmallVector;
using Action = SmallVector;
using Noise = SmallVector;

/// Flat policy parameter vector θ. Entries are finite by construction.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(Eigen::VectorXd values);
  ParamVector(std::initializer_list<double> values);

  Eigen::Index size() const noexcept { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_(i); }
  const Eigen::VectorXd& values() const noexcept { return values_; }

 private:
  Eigen::VectorXd values_;
};

}  // namespace qnpg
