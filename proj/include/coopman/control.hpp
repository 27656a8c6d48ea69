#ifndef COOPMAN_CONTROL_HPP
#define COOPMAN_CONTROL_HPP

#include <Eigen/Core>

#include "coopman/system.hpp"
#include "coopman/weighted_norm.hpp"

namespace coopman {

/// Gain data for both control modes: a scalar k scaling a fixed per-block
/// profile kbar (one gain per agent plus one for the load), and the sampling
/// period of the held law.
struct GainSchedule {
  double k = 1.0;
  Eigen::VectorXd kbar_blocks;
  double period = 1.0;  // s

  void validate(const BlockLayout& layout) const;

  /// kbar expanded to one entry per configuration coordinate.
  Eigen::VectorXd expanded(const BlockLayout& layout) const;

  /// k * kbar, expanded per coordinate.
  Eigen::VectorXd scaled_expanded(const BlockLayout& layout) const;

  static GainSchedule uniform(const BlockLayout& layout, double k = 1.0, double period = 1.0);
};

/// Velocity-level command u = -A_q K (q - qref) with K = diag(gain_diag).
/// Computed agent by agent from (q_i, q_L) only, exactly as a decentralized
/// implementation would; the result is identical to the assembled product.
Eigen::VectorXd continuous_command(const KinematicSystem& sys, const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& qref,
                                   const Eigen::VectorXd& gain_diag);

/// Zero-order-hold command u_h = -k A_{q_h} Kbar (q_h - qref), the value held
/// over one sampling window. Definitionally continuous_command with gains
/// k * kbar_diag.
Eigen::VectorXd held_command(const KinematicSystem& sys, const Eigen::VectorXd& q_h,
                             const Eigen::VectorXd& qref, double k,
                             const Eigen::VectorXd& kbar_diag);

struct OnlineCommand {
  Eigen::VectorXd u;
  double k_h = 0.0;
  bool fallback_used = false;
};

/// Predictive per-window gain: simulates the auxiliary error flow from the
/// current sample, picks k_h = tau_o / T, and returns the corresponding held
/// command. Falls back to the certified schedule.k when the rollout hits a
/// singular or out-of-domain configuration.
OnlineCommand online_command(const KinematicSystem& sys, const Eigen::VectorXd& q_h,
                             const Eigen::VectorXd& qref, const GainSchedule& schedule,
                             const WeightedNorm& norm, double radius);

}  // namespace coopman

#endif
