#ifndef COOPMAN_LINALG_HPP
#define COOPMAN_LINALG_HPP

#include <Eigen/Core>

namespace coopman {

/// Relative threshold under which a tall matrix is declared rank-deficient:
/// sigma_min < kRankTolerance * sigma_max.
inline constexpr double kRankTolerance = 1e-8;

/// Moore-Penrose pseudo-inverse of a tall, full-column-rank matrix,
/// computed from a singular value decomposition (never from the normal
/// equations). Throws SingularityError when sigma_min falls under
/// kRankTolerance * sigma_max, and StructuralError when the matrix is wide.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a);

/// Orthogonal projector A A^+ onto the column span of a.
/// Same preconditions and failure modes as pseudo_inverse.
Eigen::MatrixXd projection(const Eigen::MatrixXd& a);

/// Smallest singular value (0 for an empty matrix).
double min_singular_value(const Eigen::MatrixXd& a);

/// Applies the pseudo-inverse to a vector: returns A^+ rhs without forming
/// the full inverse. Used on integrator hot paths.
Eigen::VectorXd pseudo_inverse_apply(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs);

}  // namespace coopman

#endif
