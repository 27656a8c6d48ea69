#ifndef COOPMAN_SYSTEMS_FLY_CRANE4_HPP
#define COOPMAN_SYSTEMS_FLY_CRANE4_HPP

#include <array>
#include <string>

#include "coopman/system.hpp"

namespace coopman {

/// Four aerial agents carrying one rigid body through taut cables. Each
/// cable leaves the body at attachment b_i and swings in the body-fixed
/// vertical plane spanned by the horizontal unit axis u_i and z; its
/// elevation angle alpha_i in (0, pi) is agent i's only coordinate.
///
///   q = (alpha_1..alpha_4, xi_L, eta_L) in R^10
///   p_i = xi_L + R(eta_L) (b_i + l_i (cos alpha_i u_i + sin alpha_i z))
///
/// eta_L = (roll, pitch, yaw), R = Rz(yaw) Ry(pitch) Rx(roll).
class FlyCrane4 : public KinematicSystem {
 public:
  struct Params {
    std::array<double, 4> lengths{1.0, 1.0, 1.0, 1.0};
    std::array<Eigen::Vector3d, 4> attachments{
        Eigen::Vector3d(0.4, 0.4, 0.0), Eigen::Vector3d(-0.4, 0.4, 0.0),
        Eigen::Vector3d(-0.4, -0.4, 0.0), Eigen::Vector3d(0.4, -0.4, 0.0)};
    std::array<Eigen::Vector3d, 4> plane_axes{
        Eigen::Vector3d(1.0, 1.0, 0.0).normalized(),
        Eigen::Vector3d(-1.0, 1.0, 0.0).normalized(),
        Eigen::Vector3d(-1.0, -1.0, 0.0).normalized(),
        Eigen::Vector3d(1.0, -1.0, 0.0).normalized()};
  };

  FlyCrane4() : FlyCrane4(Params{}) {}
  explicit FlyCrane4(Params params);

  const BlockLayout& layout() const override { return layout_; }
  std::string name() const override { return "fly_crane4"; }
  void check_domain(const Eigen::VectorXd& q) const override;
  Eigen::VectorXd position(const Eigen::VectorXd& q) const override;
  BlockJacobian jacobian_blocks(const Eigen::VectorXd& q) const override;

  const Params& params() const { return params_; }

  /// Declared default working point: all cables at 1 rad, load at the
  /// origin with level attitude.
  Eigen::VectorXd reference_configuration() const override;

  static Eigen::Matrix3d rotation(const Eigen::Vector3d& eta);

 private:
  BlockLayout layout_;
  Params params_;
};

}  // namespace coopman

#endif
