#include "coopman/control.hpp"

#include <cmath>

#include "coopman/auxiliary.hpp"
#include "coopman/errors.hpp"

namespace coopman {

void GainSchedule::validate(const BlockLayout& layout) const {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw StructuralError("gains: scalar gain must be positive");
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw StructuralError("gains: sampling period must be positive");
  }
  if (kbar_blocks.size() != layout.num_agents() + 1) {
    throw StructuralError("gains: one block gain per agent plus one for the load");
  }
  for (int i = 0; i < kbar_blocks.size(); ++i) {
    if (!(kbar_blocks(i) > 0.0) || !std::isfinite(kbar_blocks(i))) {
      throw StructuralError("gains: block gains must be positive");
    }
  }
}

Eigen::VectorXd GainSchedule::expanded(const BlockLayout& layout) const {
  validate(layout);
  Eigen::VectorXd diag(layout.config_dim());
  for (int i = 0; i < layout.num_agents(); ++i) {
    diag.segment(layout.agent_offset(i), layout.agent_dims[i]).setConstant(kbar_blocks(i));
  }
  diag.segment(layout.load_offset(), layout.load_dim)
      .setConstant(kbar_blocks(layout.num_agents()));
  return diag;
}

Eigen::VectorXd GainSchedule::scaled_expanded(const BlockLayout& layout) const {
  return k * expanded(layout);
}

GainSchedule GainSchedule::uniform(const BlockLayout& layout, double k, double period) {
  GainSchedule schedule;
  schedule.k = k;
  schedule.kbar_blocks = Eigen::VectorXd::Ones(layout.num_agents() + 1);
  schedule.period = period;
  return schedule;
}

Eigen::VectorXd continuous_command(const KinematicSystem& sys, const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& qref,
                                   const Eigen::VectorXd& gain_diag) {
  const BlockLayout& layout = sys.layout();
  layout.check_config_size(q, "q");
  layout.check_config_size(qref, "qref");
  layout.check_config_size(gain_diag, "gain_diag");

  const BlockJacobian blocks = sys.jacobian_blocks(q);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(layout.workspace_dim());

  // Plain column-order loops: agent i touches only its own error block and
  // the load's, which is all a decentralized node would know.
  for (int i = 0; i < layout.num_agents(); ++i) {
    const int rows = layout.agent_pos_dims[i];
    const int pos = layout.position_offset(i);
    const int own = layout.agent_offset(i);
    for (int c = 0; c < layout.agent_dims[i]; ++c) {
      const double scaled_err = gain_diag(own + c) * (q(own + c) - qref(own + c));
      for (int r = 0; r < rows; ++r) u(pos + r) -= blocks.diag[i](r, c) * scaled_err;
    }
    const int load = layout.load_offset();
    for (int c = 0; c < layout.load_dim; ++c) {
      const double scaled_err = gain_diag(load + c) * (q(load + c) - qref(load + c));
      for (int r = 0; r < rows; ++r) u(pos + r) -= blocks.load[i](r, c) * scaled_err;
    }
  }
  return u;
}

Eigen::VectorXd held_command(const KinematicSystem& sys, const Eigen::VectorXd& q_h,
                             const Eigen::VectorXd& qref, double k,
                             const Eigen::VectorXd& kbar_diag) {
  return continuous_command(sys, q_h, qref, k * kbar_diag);
}

OnlineCommand online_command(const KinematicSystem& sys, const Eigen::VectorXd& q_h,
                             const Eigen::VectorXd& qref, const GainSchedule& schedule,
                             const WeightedNorm& norm, double radius) {
  const BlockLayout& layout = sys.layout();
  schedule.validate(layout);
  const Eigen::VectorXd e_h = q_h - qref;

  OnlineCommand out;
  if (norm(e_h) == 0.0) {
    out.u = Eigen::VectorXd::Zero(layout.workspace_dim());
    out.k_h = 0.0;
    return out;
  }

  const AuxTrajectory aux =
      simulate_auxiliary(sys, qref, e_h, schedule.kbar_blocks, norm, radius);
  if (aux.singular_flagged || !(aux.tau_o > 0.0)) {
    out.k_h = schedule.k;  // certified offline gain
    out.fallback_used = true;
  } else {
    out.k_h = aux.tau_o / schedule.period;
  }
  out.u = held_command(sys, q_h, qref, out.k_h, schedule.expanded(layout));
  return out;
}

}  // namespace coopman
