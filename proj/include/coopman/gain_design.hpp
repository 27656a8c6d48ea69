#ifndef COOPMAN_GAIN_DESIGN_HPP
#define COOPMAN_GAIN_DESIGN_HPP

#include <cstdint>

#include <Eigen/Core>

#include "coopman/system.hpp"
#include "coopman/weighted_norm.hpp"

namespace coopman {

/// Which scalar envelope g(tau; mu) certifies the per-window contraction.
///
///   weighted: max_b |1 - tau kbar_b| / d_b^2 + mu tau^2   (printed form)
///   induced:  max_b |1 - tau kbar_b|        + mu tau^2
///
/// The first is the form the design procedure is usually stated with; the
/// second is the exact induced norm of (I - tau Kbar) in the weighted norm
/// (diagonal matrices commute with the weights, so the d_b factor drops).
/// They coincide whenever all d_b = 1. Both are available; weighted is the
/// default.
enum class GVariant { weighted, induced };

double g_eval(double tau, double mu, const Eigen::VectorXd& kbar_blocks,
              const Eigen::VectorXd& d_blocks, GVariant variant = GVariant::weighted);

/// Certified window design: worst-case boundary-return time tau_s_bar (root
/// of g = 1 past the minimum), optimal rescaled window tau_o_bar (argmin of
/// g), contraction factor rho = g(tau_o_bar) < 1, and the held gain
/// k_star = tau_o_bar / T.
struct OfflineDesign {
  double mu = 0.0;
  double tau_s_bar = 0.0;
  double tau_o_bar = 0.0;
  double rho = 0.0;
  double k_star = 0.0;
  double period = 0.0;
};

OfflineDesign offline_design(double mu, const Eigen::VectorXd& kbar_blocks,
                             const Eigen::VectorXd& d_blocks, double period,
                             GVariant variant = GVariant::weighted);

/// Sampled suprema of the two sensitivity constants behind mu: a bounds the
/// product A^+(qref+e') A(qref+e) Kbar in the induced norm, b bounds the
/// flow's sensitivity to e' per unit error. Raw maxima are kept alongside
/// the shipped values, which carry a 1.1 safety inflation.
struct ABEstimate {
  double a_raw = 0.0;
  double b_raw = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::uint64_t skipped = 0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

ABEstimate estimate_ab(const KinematicSystem& sys, const Ball& ball,
                       const Eigen::VectorXd& kbar_blocks, std::uint64_t n_samples,
                       std::uint64_t seed);

/// Taylor-remainder bound mu = a b R / 2.
double mu_from_ab(double a, double b, double radius);

/// Monte-Carlo refinement: the observed supremum of
/// ||e'(tau) - (I - tau Kbar) e_h|| / (||e_h|| tau^2) over sampled initial
/// errors and a tau grid floored at 1e-3. Never exceeds mu from the same
/// ball, so designs run through it contract at least as fast.
struct MuStarEstimate {
  double mu_star = 0.0;
  std::uint64_t n_traj = 0;
  std::uint64_t skipped = 0;
  std::uint64_t seed = 0;
};

MuStarEstimate mc_mu_star(const KinematicSystem& sys, const Ball& ball,
                          const Eigen::VectorXd& kbar_blocks, std::uint64_t n_traj,
                          std::uint64_t seed);

}  // namespace coopman

#endif
