#include "coopman/systems/fly_crane4.hpp"

#include <cmath>
#include <numbers>

#include "coopman/errors.hpp"

namespace coopman {

namespace {

Eigen::Matrix3d rot_x(double a) {
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, std::cos(a), -std::sin(a),
       0, std::sin(a), std::cos(a);
  return r;
}

Eigen::Matrix3d rot_y(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), 0, std::sin(a),
       0, 1, 0,
       -std::sin(a), 0, std::cos(a);
  return r;
}

Eigen::Matrix3d rot_z(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0,
       std::sin(a), std::cos(a), 0,
       0, 0, 1;
  return r;
}

Eigen::Matrix3d drot_x(double a) {
  Eigen::Matrix3d r;
  r << 0, 0, 0,
       0, -std::sin(a), -std::cos(a),
       0, std::cos(a), -std::sin(a);
  return r;
}

Eigen::Matrix3d drot_y(double a) {
  Eigen::Matrix3d r;
  r << -std::sin(a), 0, std::cos(a),
       0, 0, 0,
       -std::cos(a), 0, -std::sin(a);
  return r;
}

Eigen::Matrix3d drot_z(double a) {
  Eigen::Matrix3d r;
  r << -std::sin(a), -std::cos(a), 0,
       std::cos(a), -std::sin(a), 0,
       0, 0, 0;
  return r;
}

}  // namespace

FlyCrane4::FlyCrane4(Params params) : layout_{{1, 1, 1, 1}, 6, {3, 3, 3, 3}}, params_(params) {
  layout_.validate();
  for (int i = 0; i < 4; ++i) {
    if (!(params_.lengths[i] > 0.0)) {
      throw StructuralError("fly_crane4: cable lengths must be positive");
    }
    const Eigen::Vector3d& u = params_.plane_axes[i];
    if (std::abs(u.norm() - 1.0) > 1e-9) {
      throw StructuralError("fly_crane4: cable-plane axes must be unit vectors");
    }
    if (std::abs(u.z()) > 1e-12) {
      throw StructuralError("fly_crane4: cable-plane axes must be horizontal");
    }
  }
}

void FlyCrane4::check_domain(const Eigen::VectorXd& q) const {
  KinematicSystem::check_domain(q);
  for (int i = 0; i < 4; ++i) {
    if (!(q(i) > 0.0 && q(i) < std::numbers::pi)) {
      throw DomainError("fly_crane4: cable angle " + std::to_string(i + 1) +
                        " outside (0, pi): " + std::to_string(q(i)));
    }
  }
}

Eigen::Matrix3d FlyCrane4::rotation(const Eigen::Vector3d& eta) {
  return rot_z(eta(2)) * rot_y(eta(1)) * rot_x(eta(0));
}

Eigen::VectorXd FlyCrane4::position(const Eigen::VectorXd& q) const {
  check_domain(q);
  const Eigen::Vector3d xi = q.segment<3>(4);
  const Eigen::Vector3d eta = q.segment<3>(7);
  const Eigen::Matrix3d r = rotation(eta);
  Eigen::VectorXd p(12);
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d cable = std::cos(q(i)) * params_.plane_axes[i] +
                                  std::sin(q(i)) * Eigen::Vector3d::UnitZ();
    p.segment<3>(3 * i) = xi + r * (params_.attachments[i] + params_.lengths[i] * cable);
  }
  return p;
}

BlockJacobian FlyCrane4::jacobian_blocks(const Eigen::VectorXd& q) const {
  check_domain(q);
  const Eigen::Vector3d eta = q.segment<3>(7);
  const Eigen::Matrix3d rx = rot_x(eta(0));
  const Eigen::Matrix3d ry = rot_y(eta(1));
  const Eigen::Matrix3d rz = rot_z(eta(2));
  const Eigen::Matrix3d r = rz * ry * rx;
  const Eigen::Matrix3d dr_roll = rz * ry * drot_x(eta(0));
  const Eigen::Matrix3d dr_pitch = rz * drot_y(eta(1)) * rx;
  const Eigen::Matrix3d dr_yaw = drot_z(eta(2)) * ry * rx;

  BlockJacobian blocks;
  for (int i = 0; i < 4; ++i) {
    const double l = params_.lengths[i];
    const Eigen::Vector3d& u = params_.plane_axes[i];
    const Eigen::Vector3d cable = std::cos(q(i)) * u + std::sin(q(i)) * Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d body_point = params_.attachments[i] + l * cable;
    const Eigen::Vector3d dcable = -std::sin(q(i)) * u + std::cos(q(i)) * Eigen::Vector3d::UnitZ();

    blocks.diag.push_back(r * (l * dcable));

    Eigen::MatrixXd load(3, 6);
    load.leftCols<3>() = Eigen::Matrix3d::Identity();
    load.col(3) = dr_roll * body_point;
    load.col(4) = dr_pitch * body_point;
    load.col(5) = dr_yaw * body_point;
    blocks.load.push_back(load);
  }
  return blocks;
}

Eigen::VectorXd FlyCrane4::reference_configuration() const {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(10);
  q.head<4>().setConstant(1.0);
  return q;
}

}  // namespace coopman
