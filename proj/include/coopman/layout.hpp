#ifndef COOPMAN_LAYOUT_HPP
#define COOPMAN_LAYOUT_HPP

#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "coopman/errors.hpp"

namespace coopman {

/// Block partition of the configuration vector q = (q_1, ..., q_N, q_L) and
/// of the stacked workspace vector p = (p_1, ..., p_N).
///
/// agent_dims[i]     = dimension of q_i
/// load_dim          = dimension of the shared object block q_L (may be 0 for
///                     synthetic test systems whose map has no object column)
/// agent_pos_dims[i] = dimension of p_i
///
/// The stacked map is over-redundant: n = sum n_i strictly exceeds
/// m = sum m_i + load_dim.
struct BlockLayout {
  std::vector<int> agent_dims;
  int load_dim = 0;
  std::vector<int> agent_pos_dims;

  int num_agents() const { return static_cast<int>(agent_dims.size()); }

  int config_dim() const {
    return std::accumulate(agent_dims.begin(), agent_dims.end(), load_dim);
  }

  int workspace_dim() const {
    return std::accumulate(agent_pos_dims.begin(), agent_pos_dims.end(), 0);
  }

  /// Offset of agent i's block inside q.
  int agent_offset(int i) const {
    int off = 0;
    for (int j = 0; j < i; ++j) off += agent_dims[j];
    return off;
  }

  /// Offset of the load block inside q (== sum of agent dims).
  int load_offset() const { return config_dim() - load_dim; }

  /// Offset of agent i's block inside p.
  int position_offset(int i) const {
    int off = 0;
    for (int j = 0; j < i; ++j) off += agent_pos_dims[j];
    return off;
  }

  /// Index of the block (0..N-1 for agents, N for the load) that owns
  /// configuration coordinate j.
  int block_of_coord(int j) const {
    int off = 0;
    for (int i = 0; i < num_agents(); ++i) {
      off += agent_dims[i];
      if (j < off) return i;
    }
    return num_agents();
  }

  void validate() const {
    if (agent_dims.size() != agent_pos_dims.size())
      throw StructuralError("layout: agent_dims and agent_pos_dims differ in length");
    if (agent_dims.empty()) throw StructuralError("layout: at least one agent required");
    for (std::size_t i = 0; i < agent_dims.size(); ++i) {
      if (agent_dims[i] < 1)
        throw StructuralError("layout: agent " + std::to_string(i) + " has dimension < 1");
      if (agent_pos_dims[i] < 1)
        throw StructuralError("layout: agent " + std::to_string(i) + " position dimension < 1");
    }
    if (load_dim < 0) throw StructuralError("layout: negative load dimension");
    if (workspace_dim() <= config_dim())
      throw StructuralError("layout: not over-redundant (needs n > m, got n=" +
                            std::to_string(workspace_dim()) + ", m=" +
                            std::to_string(config_dim()) + ")");
  }

  void check_config_size(const Eigen::VectorXd& q, const char* what) const {
    if (q.size() != config_dim())
      throw StructuralError(std::string(what) + ": expected configuration of size " +
                            std::to_string(config_dim()) + ", got " +
                            std::to_string(q.size()));
  }
};

}  // namespace coopman

#endif
