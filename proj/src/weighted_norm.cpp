#include "coopman/weighted_norm.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <utility>

#include "coopman/errors.hpp"

namespace coopman {

namespace {

Eigen::VectorXd expand_weights(const BlockLayout& layout, const Eigen::VectorXd& d,
                               NormKind kind, NormVariant variant) {
  const int nb = layout.num_agents() + 1;
  if (d.size() != nb) {
    throw StructuralError("weighted norm needs one weight per agent plus one for the load");
  }
  for (int i = 0; i < nb; ++i) {
    if (!std::isfinite(d(i)) || d(i) < 1.0) {
      throw StructuralError("block weights must be finite and >= 1");
    }
  }
  // The expanded per-block 2-norm divides each block by d_i once; the matrix
  // form and the infinity norm divide by d_i^2.
  const bool linear_in_d = (variant == NormVariant::expanded && kind == NormKind::two);
  Eigen::VectorXd w(layout.config_dim());
  for (int i = 0; i < layout.num_agents(); ++i) {
    const double scale = linear_in_d ? 1.0 / d(i) : 1.0 / (d(i) * d(i));
    w.segment(layout.agent_offset(i), layout.agent_dims[i]).setConstant(scale);
  }
  const double dl = d(nb - 1);
  const double scale_l = linear_in_d ? 1.0 / dl : 1.0 / (dl * dl);
  w.segment(layout.load_offset(), layout.load_dim).setConstant(scale_l);
  return w;
}

}  // namespace

WeightedNorm::WeightedNorm(const BlockLayout& layout, Eigen::VectorXd block_weights,
                           NormKind kind, NormVariant variant)
    : block_weights_(std::move(block_weights)),
      component_weights_(expand_weights(layout, block_weights_, kind, variant)),
      kind_(kind),
      variant_(variant) {}

double WeightedNorm::operator()(const Eigen::VectorXd& e) const {
  if (e.size() != component_weights_.size()) {
    throw StructuralError("vector size does not match the norm's layout");
  }
  const Eigen::VectorXd scaled = component_weights_.cwiseProduct(e);
  return kind_ == NormKind::two ? scaled.norm() : scaled.lpNorm<Eigen::Infinity>();
}

double WeightedNorm::induced(const Eigen::MatrixXd& m) const {
  if (m.rows() != component_weights_.size() || m.cols() != component_weights_.size()) {
    throw StructuralError("matrix size does not match the norm's layout");
  }
  const Eigen::MatrixXd scaled = component_weights_.asDiagonal() * m *
                                 component_weights_.cwiseInverse().asDiagonal();
  if (kind_ == NormKind::inf) {
    return scaled.cwiseAbs().rowwise().sum().maxCoeff();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

Ball::Ball(Eigen::VectorXd center_, double radius_, WeightedNorm norm_)
    : center(std::move(center_)), radius(radius_), norm(std::move(norm_)) {
  if (center.size() != norm.dim()) {
    throw StructuralError("ball center size does not match the norm's layout");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw StructuralError("ball radius must be positive and finite");
  }
}

}  // namespace coopman
