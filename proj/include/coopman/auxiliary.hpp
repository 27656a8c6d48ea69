#ifndef COOPMAN_AUXILIARY_HPP
#define COOPMAN_AUXILIARY_HPP

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "coopman/system.hpp"
#include "coopman/weighted_norm.hpp"

namespace coopman {

/// Result of integrating the rescaled error flow
///
///   de'/dtau = -A^+(qref + e') A(qref + e_h) Kbar e_h,   e'(0) = e_h,
///
/// which is what one sampling window of the held law looks like after
/// shifting to the window start and rescaling time by the gain. The flow is
/// gain- and period-free, so its geometry alone decides how long a window
/// is worth holding.
struct AuxTrajectory {
  std::vector<double> taus;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> norms;  // weighted norm of each state

  double initial_norm = 0.0;
  double tau_max = 0.0;  // integration horizon used

  /// First tau > 0 where the norm climbs back to its initial value;
  /// +infinity when that never happens before the horizon.
  double tau_s = std::numeric_limits<double>::infinity();
  bool boundary_hit = false;

  /// Norm minimizer over [0, min(tau_s, tau_max)] and its value.
  double tau_o = 0.0;
  double min_norm = 0.0;

  /// Set when the flow ran into a singular Jacobian or left the kinematic
  /// domain; tau_s then marks the last valid time.
  bool singular_flagged = false;
  std::string flag_reason;

  /// States at caller-requested times (integration hits them exactly).
  std::vector<std::pair<double, Eigen::VectorXd>> recorded;
};

/// Integrates the auxiliary flow with fixed-step RK4 until the norm returns
/// to the boundary, the horizon 3 / min_b(kbar_b / d_b^2) runs out, or the
/// flow fails; then localizes tau_o on the grid, refines it by golden
/// section, and polishes it to near machine precision with a bisection on
/// the sign of the norm's right derivative.
///
/// Preconditions: qref + e_h inside the open ball of the given radius.
/// e_h = 0 returns the stationary trajectory with tau_o = 0.
AuxTrajectory simulate_auxiliary(const KinematicSystem& sys, const Eigen::VectorXd& qref,
                                 const Eigen::VectorXd& e_h,
                                 const Eigen::VectorXd& kbar_blocks, const WeightedNorm& norm,
                                 double radius, const std::vector<double>& record_at = {});

}  // namespace coopman

#endif
