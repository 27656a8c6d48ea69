#ifndef COOPMAN_JACOBIAN_HPP
#define COOPMAN_JACOBIAN_HPP

#include <Eigen/Core>
#include <vector>

#include "coopman/layout.hpp"

namespace coopman {

/// Star-topology task Jacobian, stored per agent. Agent i's output depends on
/// its own coordinates (diag block, n_i x m_i) and on the shared load
/// coordinates (load block, n_i x m_L), and on nothing else.
struct BlockJacobian {
  std::vector<Eigen::MatrixXd> diag;  // one per agent
  std::vector<Eigen::MatrixXd> load;  // one per agent
};

/// Assembles the dense n x m Jacobian. Off-structure entries are exact zeros.
Eigen::MatrixXd assemble_jacobian(const BlockLayout& layout, const BlockJacobian& blocks);

}  // namespace coopman

#endif
