#include "coopman/system.hpp"

#include <cmath>

#include "coopman/errors.hpp"

namespace coopman {

void KinematicSystem::check_domain(const Eigen::VectorXd& q) const {
  layout().check_config_size(q, "configuration");
  for (int j = 0; j < q.size(); ++j) {
    if (!std::isfinite(q(j))) {
      throw DomainError(name() + ": configuration entry " + std::to_string(j) +
                        " is not finite");
    }
  }
}

Eigen::MatrixXd central_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double step) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  Eigen::VectorXd xp = x, xm = x;
  for (int j = 0; j < x.size(); ++j) {
    const double h = step * std::max(1.0, std::abs(x(j)));
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return jac;
}

}  // namespace coopman
