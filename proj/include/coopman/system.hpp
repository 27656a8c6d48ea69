#ifndef COOPMAN_SYSTEM_HPP
#define COOPMAN_SYSTEM_HPP

#include <functional>
#include <string>

#include <Eigen/Core>

#include "coopman/jacobian.hpp"
#include "coopman/layout.hpp"

namespace coopman {

/// A concrete multi-agent kinematic map p = h(q) with star topology: agent
/// i's output block depends only on (q_i, q_L). Implementations are
/// immutable after construction; every method is const and reentrant.
class KinematicSystem {
 public:
  virtual ~KinematicSystem() = default;

  virtual const BlockLayout& layout() const = 0;
  virtual std::string name() const = 0;

  /// Throws DomainError when q leaves the set where h is defined. The base
  /// rule (finite entries of the right size) applies everywhere; systems add
  /// their own restrictions on top.
  virtual void check_domain(const Eigen::VectorXd& q) const;

  /// h(q), stacked agent positions. Calls check_domain first.
  virtual Eigen::VectorXd position(const Eigen::VectorXd& q) const = 0;

  /// Analytic dh/dq in block form. Calls check_domain first.
  virtual BlockJacobian jacobian_blocks(const Eigen::VectorXd& q) const = 0;

  /// A nominal interior configuration, used as the default regulation
  /// target and as the center of working balls.
  virtual Eigen::VectorXd reference_configuration() const = 0;

  /// Assembled dense n x m Jacobian.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& q) const {
    return assemble_jacobian(layout(), jacobian_blocks(q));
  }
};

/// Generic central-difference Jacobian, used as the test oracle against
/// analytic Jacobians and for the sensitivity bound of the gain design.
/// The step is scaled per coordinate: step * max(1, |x_j|).
Eigen::MatrixXd central_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double step = 1e-6);

}  // namespace coopman

#endif
