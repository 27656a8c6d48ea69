#ifndef COOPMAN_SIM_HPP
#define COOPMAN_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "coopman/control.hpp"
#include "coopman/dynamics.hpp"
#include "coopman/system.hpp"
#include "coopman/weighted_norm.hpp"

namespace coopman {

enum class Strategy { continuous, offline, online };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

/// Relative slack on the working-ball radius before a state counts as
/// outside: absorbs integrator roundoff at the boundary.
inline constexpr double kBallExitSlack = 1e-9;

/// Closed-loop trajectory of the velocity-level model qdot = A^+ u.
struct KinematicRun {
  Strategy strategy = Strategy::continuous;
  double dt = 0.0;      // actual grid step used
  double period = 0.0;  // sampling period (0 for the continuous law)

  std::vector<double> times;
  std::vector<Eigen::VectorXd> qs;
  std::vector<double> error_norms;  // weighted norm of q - qref per grid point
  std::vector<double> k_values;     // gain in effect at each grid point

  std::vector<double> sample_instants;  // hT, grid-exact
  std::vector<double> sample_norms;     // ||e_h|| at those instants
  std::uint64_t fallback_windows = 0;   // online windows that fell back to the offline gain
};

/// Trajectory of the force-actuated model
///   M(q) qddot + C(q, qdot) qdot = A_q^T F,   F = -alpha (A_q qdot - u),
/// which collapses onto the kinematic model as alpha grows (epsilon = 1/alpha).
struct DynamicRun {
  Strategy strategy = Strategy::continuous;
  double alpha = 0.0;
  double epsilon = 0.0;
  double dt = 0.0;
  double period = 0.0;

  std::vector<double> times;
  std::vector<Eigen::VectorXd> qs;
  std::vector<Eigen::VectorXd> qdots;
  std::vector<Eigen::VectorXd> forces;  // applied F at each grid point
  std::vector<double> error_norms;
  std::vector<double> k_values;

  std::vector<double> sample_instants;
  std::vector<double> sample_norms;
  std::uint64_t fallback_windows = 0;

  /// Low-gain runs may leave the working ball or blow up; both are recorded
  /// rather than thrown, since the model only promises convergence for high
  /// gains. A diverged run is truncated at the last finite state.
  bool ball_exited = false;
  bool diverged = false;
};

/// Integrates qdot = A^+(q) u with the continuous law u = -A_q K (q - qref),
/// K = diag(gain_diag), by fixed-step RK4 from t = 0 to t_end. The error
/// contracts coordinatewise like exp(-K t), so leaving the ball or meeting a
/// singular Jacobian aborts with a diagnostic (it indicates a bad setup).
/// dt is snapped to t_end / round(t_end / dt) and must divide t_end to 1e-9
/// relative.
KinematicRun integrate_kinematic_continuous(const KinematicSystem& sys,
                                            const Eigen::VectorXd& q0, const Ball& ball,
                                            const Eigen::VectorXd& gain_diag, double t_end,
                                            double dt);

/// Integrates the zero-order-hold loop: at each instant hT the command
/// u_h = -k_h A_{q_h} Kbar e_h is frozen and qdot = A^+(q) u_h is integrated
/// across the window. Strategy offline holds k_h = schedule.k; online picks
/// k_h per window from the auxiliary flow. dt must divide the period and
/// t_end must be a whole number of periods (both to 1e-9 relative).
KinematicRun integrate_kinematic_sampled(const KinematicSystem& sys, const Eigen::VectorXd& q0,
                                         const Ball& ball, const GainSchedule& schedule,
                                         Strategy strategy, double t_end, double dt);

/// Integrates the force-actuated loop with RK4 on (q, qdot). The force gain
/// alpha sets the fast time scale epsilon = 1/alpha; dt > epsilon / 10 is
/// refused as unresolvably stiff. The command u follows the chosen strategy
/// (continuous: recomputed at every integrator stage; offline/online: frozen
/// per sampling window from the measured q(hT)). qdot0 defaults to zero at
/// the call site by passing a zero vector.
DynamicRun integrate_dynamic(const KinematicSystem& sys, const DynamicParams& params,
                             const Eigen::VectorXd& q0, const Eigen::VectorXd& qdot0,
                             const Ball& ball, const GainSchedule& schedule, Strategy strategy,
                             double alpha, double t_end, double dt);

/// Numerical check of the two-time-scale hypotheses behind the high-gain
/// collapse, sampled over a ball of configurations.
struct AssumptionReport {
  std::uint64_t n_samples = 0;
  std::uint64_t skipped = 0;
  double k = 0.0;

  /// Residual of the full vector field at (e, qdot) = (0, 0): exact
  /// equilibrium at the reference.
  double equilibrium_residual = 0.0;
  bool equilibrium_ok = false;

  /// Residual of the algebraic root qdot = -k e of the fast subsystem, and
  /// its isolation margin min sigma_min(A)^2 (nonsingular d/dqdot).
  double root_residual = 0.0;
  double isolation_margin = 0.0;
  bool root_ok = false;

  /// Finite suprema of ||A||, ||A^+||, ||M^-1|| over the samples.
  double sup_jacobian = 0.0;
  double sup_pinv = 0.0;
  double sup_mass_inverse = 0.0;
  bool boundedness_ok = false;

  /// Reduced system edot = -k e needs k > 0.
  double reduced_rate = 0.0;
  bool reduced_ok = false;

  /// Boundary layer dy/dtau = -M^-1 A^T A y: smallest eigenvalue of
  /// M^-1 A^T A over the samples (all eigenvalues are real and must be
  /// positive for the layer to be exponentially stable).
  double hurwitz_margin = 0.0;
  bool hurwitz_ok = false;

  bool all_ok() const {
    return equilibrium_ok && root_ok && boundedness_ok && reduced_ok && hurwitz_ok;
  }
};

/// Evaluates the report over n_samples configurations drawn from the ball
/// (plus its center). k <= 0 is reported as a failed reduced-system check,
/// not an error; sampling failures (singular draws) are counted and skipped.
AssumptionReport check_sp_assumptions(const KinematicSystem& sys, const DynamicParams& params,
                                      const Ball& ball, double k, std::uint64_t n_samples,
                                      std::uint64_t seed);

}  // namespace coopman

#endif
