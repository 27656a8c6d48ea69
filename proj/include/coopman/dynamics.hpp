#ifndef COOPMAN_DYNAMICS_HPP
#define COOPMAN_DYNAMICS_HPP

#include <Eigen/Core>

#include "coopman/system.hpp"

namespace coopman {

enum class CoriolisMode { zero, christoffel };

/// Inertial data for the induced joint-space dynamics
///   M(q) = A_q^T Lambda A_q + S^T M_L S
/// with Lambda = diag(mass_i I_{n_i}) stacking workspace point masses and S
/// the selector of the load block.
struct DynamicParams {
  Eigen::VectorXd agent_masses;   // kg, one per agent
  Eigen::MatrixXd load_inertia;   // m_L x m_L, symmetric positive definite
  CoriolisMode coriolis = CoriolisMode::christoffel;

  /// Unit agent masses and identity-scaled load inertia.
  static DynamicParams unit(const BlockLayout& layout, double load_scale = 1.0);

  void validate(const BlockLayout& layout) const;
};

/// Joint-space inertia matrix; symmetric positive definite whenever A_q has
/// full column rank (enforced, throws SingularityError otherwise).
Eigen::MatrixXd mass_matrix(const KinematicSystem& sys, const DynamicParams& params,
                            const Eigen::VectorXd& q);

/// Coriolis/centripetal matrix from the Christoffel symbols of M(q), with
/// the partial derivatives taken by central differences (relative step
/// 1e-6), or the zero matrix in mode zero. By construction dM/dt - 2C is
/// skew-symmetric up to the finite-difference error.
Eigen::MatrixXd coriolis_matrix(const KinematicSystem& sys, const DynamicParams& params,
                                const Eigen::VectorXd& q, const Eigen::VectorXd& qdot);

}  // namespace coopman

#endif
