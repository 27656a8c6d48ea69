#include "coopman/systems/linear_tall.hpp"

#include <utility>

#include "coopman/errors.hpp"
#include "coopman/linalg.hpp"

namespace coopman {

LinearTallSystem::LinearTallSystem(BlockLayout layout, Eigen::MatrixXd b)
    : layout_(std::move(layout)), b_(std::move(b)) {
  layout_.validate();
  if (b_.rows() != layout_.workspace_dim() || b_.cols() != layout_.config_dim()) {
    throw StructuralError("linear_tall: matrix shape does not match the layout");
  }
  // Slice the star-pattern blocks and verify nothing lives off-pattern, so
  // the declared topology is true by construction.
  for (int i = 0; i < layout_.num_agents(); ++i) {
    blocks_.diag.push_back(b_.block(layout_.position_offset(i), layout_.agent_offset(i),
                                    layout_.agent_pos_dims[i], layout_.agent_dims[i]));
    blocks_.load.push_back(b_.block(layout_.position_offset(i), layout_.load_offset(),
                                    layout_.agent_pos_dims[i], layout_.load_dim));
  }
  const Eigen::MatrixXd reassembled = assemble_jacobian(layout_, blocks_);
  if ((reassembled - b_).cwiseAbs().maxCoeff() != 0.0) {
    throw StructuralError("linear_tall: matrix has entries outside the star pattern");
  }
  if (min_singular_value(b_) < kRankTolerance) {
    throw SingularityError("linear_tall: matrix is column-rank deficient",
                           min_singular_value(b_));
  }
}

LinearTallSystem LinearTallSystem::ones_column() {
  Eigen::MatrixXd b(2, 1);
  b << 1.0, 1.0;
  return LinearTallSystem(BlockLayout{{1}, 0, {2}}, b);
}

LinearTallSystem LinearTallSystem::default_instance() {
  Eigen::MatrixXd b(4, 3);
  b << 1.0, 0.0, 0.1,
       0.2, 0.0, 1.0,
       0.0, 0.9, -0.2,
       0.0, -0.3, 1.1;
  return LinearTallSystem(BlockLayout{{1, 1}, 1, {2, 2}}, b);
}

Eigen::VectorXd LinearTallSystem::position(const Eigen::VectorXd& q) const {
  check_domain(q);
  return b_ * q;
}

BlockJacobian LinearTallSystem::jacobian_blocks(const Eigen::VectorXd& q) const {
  check_domain(q);
  return blocks_;
}

}  // namespace coopman
