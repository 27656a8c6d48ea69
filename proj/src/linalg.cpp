#include "coopman/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "coopman/errors.hpp"

namespace coopman {

namespace {

Eigen::JacobiSVD<Eigen::MatrixXd> checked_svd(const Eigen::MatrixXd& a) {
  if (a.rows() < a.cols())
    throw StructuralError("pseudo_inverse: matrix is wide (" + std::to_string(a.rows()) +
                          "x" + std::to_string(a.cols()) + "), expected tall");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double sigma_min = sigma.size() > 0 ? sigma(sigma.size() - 1) : 0.0;
  if (sigma_max == 0.0 || sigma_min < kRankTolerance * sigma_max)
    throw SingularityError("rank-deficient matrix (sigma_min=" + std::to_string(sigma_min) +
                               ", sigma_max=" + std::to_string(sigma_max) + ")",
                           sigma_min);
  return svd;
}

}  // namespace

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a) {
  auto svd = checked_svd(a);
  return svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
         svd.matrixU().transpose();
}

Eigen::MatrixXd projection(const Eigen::MatrixXd& a) {
  auto svd = checked_svd(a);
  // A A^+ = U U^T with U the thin left factor.
  return svd.matrixU() * svd.matrixU().transpose();
}

double min_singular_value(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sigma = svd.singularValues();
  return sigma(sigma.size() - 1);
}

Eigen::VectorXd pseudo_inverse_apply(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs) {
  // Hot path: a rank-revealing QR least-squares solve costs a fraction of the
  // SVD and its R diagonal still exposes rank collapse reliably at the 1e-8
  // relative threshold used everywhere else.
  if (a.rows() < a.cols())
    throw StructuralError("pseudo_inverse_apply: matrix is wide, expected tall");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const auto& r = qr.matrixR();
  const int m = static_cast<int>(a.cols());
  const double r_max = std::abs(r(0, 0));
  const double r_min = std::abs(r(m - 1, m - 1));
  if (r_max == 0.0 || r_min < kRankTolerance * r_max)
    throw SingularityError("rank-deficient matrix (|r_min|=" + std::to_string(r_min) +
                               ", |r_max|=" + std::to_string(r_max) + ")",
                           r_min);
  return qr.solve(rhs);
}

}  // namespace coopman
