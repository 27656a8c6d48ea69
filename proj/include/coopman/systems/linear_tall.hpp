#ifndef COOPMAN_SYSTEMS_LINEAR_TALL_HPP
#define COOPMAN_SYSTEMS_LINEAR_TALL_HPP

#include <string>

#include "coopman/system.hpp"

namespace coopman {

/// Exact-oracle system: h(q) = B q with a constant tall full-column-rank B
/// whose sparsity already matches the star pattern of the given layout.
/// Everything downstream (deadbeat sampling, vanishing Taylor remainder,
/// linear closed loops) has a closed form on it.
class LinearTallSystem : public KinematicSystem {
 public:
  LinearTallSystem(BlockLayout layout, Eigen::MatrixXd b);

  /// B = [1; 1] acting on a single scalar coordinate (m = 1, n = 2).
  static LinearTallSystem ones_column();

  /// Two agents plus a shared scalar load coordinate (m = 3, n = 4), generic
  /// well-conditioned entries. The default test instance.
  static LinearTallSystem default_instance();

  const BlockLayout& layout() const override { return layout_; }
  std::string name() const override { return "linear_tall"; }
  Eigen::VectorXd position(const Eigen::VectorXd& q) const override;
  BlockJacobian jacobian_blocks(const Eigen::VectorXd& q) const override;

  /// The origin: a linear map has no distinguished interior point.
  Eigen::VectorXd reference_configuration() const override {
    return Eigen::VectorXd::Zero(layout_.config_dim());
  }

  const Eigen::MatrixXd& matrix() const { return b_; }

 private:
  BlockLayout layout_;
  Eigen::MatrixXd b_;
  BlockJacobian blocks_;  // constant, sliced once at construction
};

}  // namespace coopman

#endif
