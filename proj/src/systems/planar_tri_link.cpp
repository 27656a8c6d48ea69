#include "coopman/systems/planar_tri_link.hpp"

#include <cmath>
#include <numbers>

#include "coopman/errors.hpp"

namespace coopman {

PlanarTriLink::PlanarTriLink(Params params)
    : layout_{{1, 1, 1}, 2, {2, 2, 2}}, params_(params) {
  layout_.validate();
  for (double l : params_.lengths) {
    if (!(l > 0.0)) throw StructuralError("planar_tri_link: link lengths must be positive");
  }
}

Eigen::VectorXd PlanarTriLink::position(const Eigen::VectorXd& q) const {
  check_domain(q);
  const Eigen::Vector2d load = q.segment<2>(layout_.load_offset());
  Eigen::VectorXd p(6);
  for (int i = 0; i < 3; ++i) {
    const double phi = q(i);
    p.segment<2>(2 * i) =
        load + params_.offsets[i] +
        params_.lengths[i] * Eigen::Vector2d(std::cos(phi), std::sin(phi));
  }
  return p;
}

BlockJacobian PlanarTriLink::jacobian_blocks(const Eigen::VectorXd& q) const {
  check_domain(q);
  BlockJacobian blocks;
  for (int i = 0; i < 3; ++i) {
    const double phi = q(i);
    blocks.diag.push_back(params_.lengths[i] *
                          (Eigen::MatrixXd(2, 1) << -std::sin(phi), std::cos(phi)).finished());
    blocks.load.push_back(Eigen::MatrixXd::Identity(2, 2));
  }
  return blocks;
}

Eigen::VectorXd PlanarTriLink::reference_configuration() const {
  Eigen::VectorXd q(5);
  const double deg = std::numbers::pi / 180.0;
  q << 90.0 * deg, 210.0 * deg, 330.0 * deg, 0.0, 0.0;
  return q;
}

}  // namespace coopman
