#ifndef COOPMAN_WEIGHTED_NORM_HPP
#define COOPMAN_WEIGHTED_NORM_HPP

#include <Eigen/Core>

#include "coopman/layout.hpp"

namespace coopman {

enum class NormKind { two, inf };

/// How the per-block weights d_i enter the norm.
///
///   matrix:   ||e|| = ||D e||_kind with D block-diagonal, D_i = (1/d_i^2) I.
///   expanded: the per-block alternative that scales 2-norm blocks by 1/d_i
///             instead of 1/d_i^2 (infinity-norm blocks are scaled by 1/d_i^2
///             in both variants, where the two definitions already agree).
///
/// The matrix form is the default; the expanded form is kept as a switch so
/// the two conventions can be compared on the same runs.
enum class NormVariant { matrix, expanded };

/// Block-weighted norm ||.||_{D,kind} over configuration-error vectors.
/// Weights are per block (one d per agent plus one for the load), all >= 1.
class WeightedNorm {
public:
  WeightedNorm(const BlockLayout& layout, Eigen::VectorXd block_weights, NormKind kind,
               NormVariant variant = NormVariant::matrix);

  double operator()(const Eigen::VectorXd& e) const;

  /// Matrix norm induced by this vector norm: ||W M W^-1||_kind with W the
  /// componentwise weight diagonal (exact row-sum form for inf, largest
  /// singular value for two).
  double induced(const Eigen::MatrixXd& m) const;

  NormKind kind() const { return kind_; }
  NormVariant variant() const { return variant_; }
  const Eigen::VectorXd& block_weights() const { return block_weights_; }
  /// Componentwise scale applied before taking the plain kind-norm.
  const Eigen::VectorXd& component_weights() const { return component_weights_; }
  int dim() const { return static_cast<int>(component_weights_.size()); }

private:
  Eigen::VectorXd block_weights_;      // d_1 .. d_N, d_L
  Eigen::VectorXd component_weights_;  // expanded over coordinates
  NormKind kind_;
  NormVariant variant_;
};

/// Open ball { q : ||q - center||_{D,kind} < radius }.
struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;
  WeightedNorm norm;

  Ball(Eigen::VectorXd center_, double radius_, WeightedNorm norm_);

  /// Membership with a relative slack so roundoff at the boundary does not
  /// flip the answer: ||q - center|| < radius * (1 + rel_slack).
  bool contains(const Eigen::VectorXd& q, double rel_slack = 0.0) const {
    return norm(q - center) < radius * (1.0 + rel_slack);
  }

  double error_norm(const Eigen::VectorXd& q) const { return norm(q - center); }
};

}  // namespace coopman

#endif
