#include "coopman/dynamics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "coopman/errors.hpp"
#include "coopman/linalg.hpp"

namespace coopman {

namespace {

constexpr double kChristoffelStep = 1e-6;

Eigen::VectorXd workspace_masses(const BlockLayout& layout, const DynamicParams& params) {
  Eigen::VectorXd lambda(layout.workspace_dim());
  for (int i = 0; i < layout.num_agents(); ++i) {
    lambda.segment(layout.position_offset(i), layout.agent_pos_dims[i])
        .setConstant(params.agent_masses(i));
  }
  return lambda;
}

// Hot-path inertia assembly without the rank check; the public entry point
// adds the check once per call site.
Eigen::MatrixXd mass_matrix_raw(const KinematicSystem& sys, const DynamicParams& params,
                                const Eigen::VectorXd& q, const Eigen::VectorXd& lambda) {
  const Eigen::MatrixXd a = sys.jacobian(q);
  const BlockLayout& layout = sys.layout();
  Eigen::MatrixXd m = a.transpose() * lambda.asDiagonal() * a;
  if (layout.load_dim > 0) {
    m.block(layout.load_offset(), layout.load_offset(), layout.load_dim, layout.load_dim) +=
        params.load_inertia;
  }
  return m;
}

}  // namespace

DynamicParams DynamicParams::unit(const BlockLayout& layout, double load_scale) {
  DynamicParams params;
  params.agent_masses = Eigen::VectorXd::Ones(layout.num_agents());
  params.load_inertia = load_scale * Eigen::MatrixXd::Identity(layout.load_dim, layout.load_dim);
  return params;
}

void DynamicParams::validate(const BlockLayout& layout) const {
  if (agent_masses.size() != layout.num_agents()) {
    throw StructuralError("dynamics: one mass per agent required");
  }
  for (int i = 0; i < agent_masses.size(); ++i) {
    if (!(agent_masses(i) > 0.0) || !std::isfinite(agent_masses(i))) {
      throw StructuralError("dynamics: agent masses must be positive");
    }
  }
  if (load_inertia.rows() != layout.load_dim || load_inertia.cols() != layout.load_dim) {
    throw StructuralError("dynamics: load inertia must be m_L x m_L");
  }
  if (layout.load_dim > 0) {
    if ((load_inertia - load_inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw StructuralError("dynamics: load inertia must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(load_inertia);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
      throw StructuralError("dynamics: load inertia must be positive definite");
    }
  }
}

Eigen::MatrixXd mass_matrix(const KinematicSystem& sys, const DynamicParams& params,
                            const Eigen::VectorXd& q) {
  params.validate(sys.layout());
  const Eigen::MatrixXd a = sys.jacobian(q);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const double sigma_max = svd.singularValues()(0);
  const double sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  if (sigma_max == 0.0 || sigma_min < kRankTolerance * sigma_max) {
    throw SingularityError(sys.name() + ": Jacobian rank-deficient in mass matrix",
                           sigma_min);
  }
  return mass_matrix_raw(sys, params, q, workspace_masses(sys.layout(), params));
}

Eigen::MatrixXd coriolis_matrix(const KinematicSystem& sys, const DynamicParams& params,
                                const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) {
  const BlockLayout& layout = sys.layout();
  layout.check_config_size(q, "q");
  layout.check_config_size(qdot, "qdot");
  const int m = layout.config_dim();
  if (params.coriolis == CoriolisMode::zero) return Eigen::MatrixXd::Zero(m, m);

  params.validate(layout);
  const Eigen::VectorXd lambda = workspace_masses(layout, params);

  std::vector<Eigen::MatrixXd> dm(m);
  Eigen::VectorXd qp = q, qm = q;
  for (int k = 0; k < m; ++k) {
    const double h = kChristoffelStep * std::max(1.0, std::abs(q(k)));
    qp(k) = q(k) + h;
    qm(k) = q(k) - h;
    dm[k] = (mass_matrix_raw(sys, params, qp, lambda) -
             mass_matrix_raw(sys, params, qm, lambda)) /
            (2.0 * h);
    qp(k) = q(k);
    qm(k) = q(k);
  }

  Eigen::MatrixXd c(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double cij = 0.0;
      for (int k = 0; k < m; ++k) {
        cij += 0.5 * (dm[k](i, j) + dm[j](i, k) - dm[i](j, k)) * qdot(k);
      }
      c(i, j) = cij;
    }
  }
  return c;
}

}  // namespace coopman
