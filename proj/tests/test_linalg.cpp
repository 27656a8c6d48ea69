#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "coopman/errors.hpp"
#include "coopman/linalg.hpp"

using coopman::min_singular_value;
using coopman::projection;
using coopman::pseudo_inverse;
using coopman::pseudo_inverse_apply;

namespace {

// Deterministic full-column-rank tall matrices for the property checks.
Eigen::MatrixXd tall_matrix(int rows, int cols, unsigned seed) {
  std::srand(seed);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(rows, cols);
  // Bias the diagonal so rank deficiency cannot occur by accident.
  for (int j = 0; j < cols; ++j) a(j, j) += 2.0;
  return a;
}

}  // namespace

TEST_CASE("pseudo-inverse of the stacked ones column") {
  Eigen::MatrixXd a(2, 1);
  a << 1.0, 1.0;
  const Eigen::MatrixXd api = pseudo_inverse(a);
  REQUIRE(api.rows() == 1);
  REQUIRE(api.cols() == 2);
  CHECK(api(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(api(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pseudo-inverse kills the dead row") {
  Eigen::MatrixXd a(3, 2);
  a << 2.0, 0.0,
       0.0, 0.0,
       0.0, 1.0;
  const Eigen::MatrixXd api = pseudo_inverse(a);
  Eigen::MatrixXd expected(2, 3);
  expected << 0.5, 0.0, 0.0,
              0.0, 0.0, 1.0;
  CHECK((api - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projection onto the ones column averages") {
  Eigen::MatrixXd a(2, 1);
  a << 1.0, 1.0;
  const Eigen::MatrixXd pi = projection(a);
  Eigen::MatrixXd expected(2, 2);
  expected << 0.5, 0.5,
              0.5, 0.5;
  CHECK((pi - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("smallest singular value of the ones column") {
  Eigen::MatrixXd a(2, 1);
  a << 1.0, 1.0;
  CHECK(min_singular_value(a) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("rank-deficient tall matrix is rejected with its sigma_min") {
  Eigen::MatrixXd a(3, 2);
  a << 1.0, 1.0,
       1.0, 1.0,
       0.0, 0.0;
  bool thrown = false;
  try {
    pseudo_inverse(a);
  } catch (const coopman::SingularityError& err) {
    thrown = true;
    CHECK(err.sigma_min() < 1e-12);
  }
  CHECK(thrown);
  CHECK_THROWS_AS(projection(a), coopman::SingularityError);
}

TEST_CASE("wide matrices are a structural error") {
  Eigen::MatrixXd a(1, 2);
  a << 1.0, 2.0;
  CHECK_THROWS_AS(pseudo_inverse(a), coopman::StructuralError);
}

TEST_CASE("Moore-Penrose identities on random tall matrices") {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const int rows = 3 + static_cast<int>(seed % 5);
    const int cols = 1 + static_cast<int>(seed % 3);
    const Eigen::MatrixXd a = tall_matrix(rows, cols, seed);
    const Eigen::MatrixXd api = pseudo_inverse(a);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(cols, cols);

    CAPTURE(seed);
    CHECK((api * a - eye).cwiseAbs().maxCoeff() < 1e-10);              // left inverse
    CHECK((a * api * a - a).cwiseAbs().maxCoeff() < 1e-10);            // A A+ A = A
    CHECK((api * a * api - api).cwiseAbs().maxCoeff() < 1e-10);        // A+ A A+ = A+
    const Eigen::MatrixXd aap = a * api;
    CHECK((aap - aap.transpose()).cwiseAbs().maxCoeff() < 1e-10);      // symmetry

    const Eigen::MatrixXd pi = projection(a);
    CHECK((pi - aap).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pi * pi - pi).cwiseAbs().maxCoeff() < 1e-10);               // idempotent
    CHECK((pi * a - a).cwiseAbs().maxCoeff() < 1e-10);                 // fixes range
  }
}

TEST_CASE("pseudo_inverse_apply matches the assembled pseudo-inverse") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const Eigen::MatrixXd a = tall_matrix(5, 3, seed + 100);
    std::srand(seed + 500);
    const Eigen::VectorXd rhs = Eigen::VectorXd::Random(5);
    const Eigen::VectorXd direct = pseudo_inverse(a) * rhs;
    const Eigen::VectorXd applied = pseudo_inverse_apply(a, rhs);
    CAPTURE(seed);
    CHECK((direct - applied).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("near-singular detection uses a relative threshold") {
  // Tiny but well-conditioned matrices pass; badly conditioned ones throw.
  Eigen::MatrixXd ok = 1e-12 * Eigen::MatrixXd::Identity(3, 2);
  CHECK_NOTHROW(pseudo_inverse(ok));

  Eigen::MatrixXd bad(3, 2);
  bad << 1.0, 0.0,
         0.0, 1e-9,
         0.0, 0.0;
  CHECK_THROWS_AS(pseudo_inverse(bad), coopman::SingularityError);
}
