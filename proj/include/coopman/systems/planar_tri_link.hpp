#ifndef COOPMAN_SYSTEMS_PLANAR_TRI_LINK_HPP
#define COOPMAN_SYSTEMS_PLANAR_TRI_LINK_HPP

#include <array>
#include <string>

#include "coopman/system.hpp"

namespace coopman {

/// Smallest over-redundant analytic example: three planar agents, each at
/// the tip of a rigid link of length l_i hinged at offset b_i from a load
/// point q_L in R^2.
///
///   q = (phi_1, phi_2, phi_3, q_L) in R^5,   p in R^6
///   p_i = q_L + b_i + l_i (cos phi_i, sin phi_i)
///
/// The Jacobian loses rank only when all three link angles align modulo pi.
class PlanarTriLink : public KinematicSystem {
 public:
  struct Params {
    std::array<double, 3> lengths{1.0, 0.9, 1.1};
    std::array<Eigen::Vector2d, 3> offsets{Eigen::Vector2d(0.25, 0.0),
                                           Eigen::Vector2d(-0.125, 0.2),
                                           Eigen::Vector2d(-0.125, -0.2)};
  };

  PlanarTriLink() : PlanarTriLink(Params{}) {}
  explicit PlanarTriLink(Params params);

  const BlockLayout& layout() const override { return layout_; }
  std::string name() const override { return "planar_tri_link"; }
  Eigen::VectorXd position(const Eigen::VectorXd& q) const override;
  BlockJacobian jacobian_blocks(const Eigen::VectorXd& q) const override;

  const Params& params() const { return params_; }

  /// Well-spread reference: angles at 90, 210, 330 degrees, load at origin.
  Eigen::VectorXd reference_configuration() const override;

 private:
  BlockLayout layout_;
  Params params_;
};

}  // namespace coopman

#endif
