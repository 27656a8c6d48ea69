#include "coopman/jacobian.hpp"

#include "coopman/errors.hpp"

namespace coopman {

Eigen::MatrixXd assemble_jacobian(const BlockLayout& layout, const BlockJacobian& blocks) {
  const int n_agents = layout.num_agents();
  if (static_cast<int>(blocks.diag.size()) != n_agents ||
      static_cast<int>(blocks.load.size()) != n_agents) {
    throw StructuralError("jacobian needs one diag and one load block per agent");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(layout.workspace_dim(), layout.config_dim());
  for (int i = 0; i < n_agents; ++i) {
    const int rows = layout.agent_pos_dims[i];
    if (blocks.diag[i].rows() != rows || blocks.diag[i].cols() != layout.agent_dims[i]) {
      throw StructuralError("diag block size mismatch");
    }
    if (blocks.load[i].rows() != rows || blocks.load[i].cols() != layout.load_dim) {
      throw StructuralError("load block size mismatch");
    }
    a.block(layout.position_offset(i), layout.agent_offset(i), rows, layout.agent_dims[i]) =
        blocks.diag[i];
    a.block(layout.position_offset(i), layout.load_offset(), rows, layout.load_dim) =
        blocks.load[i];
  }
  return a;
}

}  // namespace coopman
