#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Core>
#include <unsupported/Eigen/MatrixFunctions>

#include "coopman/auxiliary.hpp"
#include "coopman/control.hpp"
#include "coopman/dynamics.hpp"
#include "coopman/errors.hpp"
#include "coopman/gain_design.hpp"
#include "coopman/rng.hpp"
#include "coopman/sim.hpp"
#include "coopman/systems/fly_crane4.hpp"
#include "coopman/systems/linear_tall.hpp"
#include "coopman/systems/planar_tri_link.hpp"
#include "coopman/weighted_norm.hpp"

using namespace coopman;

namespace {

WeightedNorm uniform_norm(const BlockLayout& layout, NormKind kind) {
  return WeightedNorm(layout, Eigen::VectorXd::Ones(layout.num_agents() + 1), kind);
}

}  // namespace

TEST_CASE("strategy names round trip") {
  for (Strategy s : {Strategy::continuous, Strategy::offline, Strategy::online}) {
    CHECK(strategy_from_name(strategy_name(s)) == s);
  }
  CHECK_THROWS_AS((void)strategy_from_name("sliding"), StructuralError);
}

TEST_CASE("continuous run from the reference stays put") {
  const PlanarTriLink sys;
  const BlockLayout& layout = sys.layout();
  const Eigen::VectorXd qref = sys.reference_configuration();
  const Ball ball{qref, 0.5, uniform_norm(layout, NormKind::inf)};
  const Eigen::VectorXd gain = Eigen::VectorXd::Constant(layout.config_dim(), 2.0);

  const KinematicRun run = integrate_kinematic_continuous(sys, qref, ball, gain, 1.0, 0.05);
  REQUIRE(run.times.size() == 21);
  for (const Eigen::VectorXd& q : run.qs) {
    CHECK((q - qref).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(run.error_norms.back() == 0.0);
}

TEST_CASE("continuous run matches the componentwise exponential") {
  const FlyCrane4 sys;
  const BlockLayout& layout = sys.layout();
  const Eigen::VectorXd qref = sys.reference_configuration();
  const WeightedNorm norm = uniform_norm(layout, NormKind::two);

  Rng rng(601);
  Eigen::VectorXd e0 = rng.normal_vector(layout.config_dim());
  e0 *= 0.25 / norm(e0);
  const Ball ball{qref, 0.3, norm};

  Eigen::VectorXd gain(layout.config_dim());
  for (int j = 0; j < gain.size(); ++j) gain(j) = 0.5 + 0.2 * (j % 4);

  const double t_end = 4.0;
  const double dt = 0.01;
  const KinematicRun run =
      integrate_kinematic_continuous(sys, (qref + e0).eval(), ball, gain, t_end, dt);

  double rms = 0.0;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const Eigen::VectorXd expect =
        qref + (-run.times[i] * gain.array()).exp().matrix().asDiagonal() * e0;
    rms += (run.qs[i] - expect).squaredNorm();
  }
  rms = std::sqrt(rms / static_cast<double>(run.times.size()));
  CHECK(rms <= 1e-9);

  // Norm decreases monotonically along the grid.
  for (std::size_t i = 1; i < run.error_norms.size(); ++i) {
    CHECK(run.error_norms[i] < run.error_norms[i - 1]);
  }
}

TEST_CASE("integrator converges at fourth order on the linear loop") {
  const LinearTallSystem sys = LinearTallSystem::default_instance();
  const BlockLayout& layout = sys.layout();
  const WeightedNorm norm = uniform_norm(layout, NormKind::two);
  const Eigen::VectorXd qref = Eigen::VectorXd::Zero(layout.config_dim());
  Eigen::VectorXd e0(3);
  e0 << 0.3, -0.2, 0.1;
  const Ball ball{qref, 1.0, norm};
  const Eigen::VectorXd gain = Eigen::VectorXd::Constant(layout.config_dim(), 1.0);

  const auto endpoint_error = [&](double dt) {
    const KinematicRun run = integrate_kinematic_continuous(sys, e0, ball, gain, 2.0, dt);
    const Eigen::VectorXd expect = std::exp(-2.0) * e0;
    return (run.qs.back() - expect).cwiseAbs().maxCoeff();
  };
  const double coarse = endpoint_error(0.25);
  const double fine = endpoint_error(0.125);
  CHECK(coarse / fine > 12.0);
  CHECK(coarse / fine < 20.0);
}

TEST_CASE("grid snapping rejects incompatible steps") {
  const LinearTallSystem sys = LinearTallSystem::default_instance();
  const BlockLayout& layout = sys.layout();
  const Ball ball{Eigen::VectorXd::Zero(layout.config_dim()), 1.0, uniform_norm(layout, NormKind::two)};
  const Eigen::VectorXd gain = Eigen::VectorXd::Ones(layout.config_dim());
  Eigen::VectorXd q0(3);
  q0 << 0.1, 0.1, 0.1;

  CHECK_THROWS_AS(
      (void)integrate_kinematic_continuous(sys, q0, ball, gain, 1.0, 0.3), StructuralError);

  GainSchedule schedule = GainSchedule::uniform(layout, 0.5, 1.5);
  CHECK_THROWS_AS(
      (void)integrate_kinematic_sampled(sys, q0, ball, schedule, Strategy::offline, 3.0, 0.4),
      StructuralError);
  CHECK_THROWS_AS(
      (void)integrate_kinematic_sampled(sys, q0, ball, schedule, Strategy::offline, 2.0, 0.1),
      StructuralError);
  CHECK_THROWS_AS(
      (void)integrate_kinematic_sampled(sys, q0, ball, schedule, Strategy::continuous, 3.0, 0.1),
      StructuralError);
}

TEST_CASE("deadbeat: constant map cancels the error in one period") {
  const LinearTallSystem sys = LinearTallSystem::default_instance();
  const BlockLayout& layout = sys.layout();
  const WeightedNorm norm = uniform_norm(layout, NormKind::two);
  const Eigen::VectorXd qref = Eigen::VectorXd::Zero(layout.config_dim());
  const Ball ball{qref, 1.0, norm};

  Rng rng(602);
  Eigen::VectorXd e0 = rng.normal_vector(layout.config_dim());
  e0 *= 0.5 / norm(e0);

  const double period = 1.5;
  GainSchedule schedule = GainSchedule::uniform(layout, 1.0 / period, period);

  for (Strategy strategy : {Strategy::offline, Strategy::online}) {
    CAPTURE(strategy_name(strategy));
    const KinematicRun run =
        integrate_kinematic_sampled(sys, e0, ball, schedule, strategy, 3.0, period / 64.0);
    REQUIRE(run.sample_norms.size() == 3);
    CHECK(run.sample_norms[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(run.sample_norms[1] <= 1e-10);
    CHECK(run.sample_norms[2] <= 1e-10);
    CHECK(run.fallback_windows <= 1);  // second window starts at zero error
  }
}

TEST_CASE("sampled run covers every sampling instant exactly") {
  const PlanarTriLink sys;
  const BlockLayout& layout = sys.layout();
  const WeightedNorm norm = uniform_norm(layout, NormKind::inf);
  const Eigen::VectorXd qref = sys.reference_configuration();

  Rng rng(603);
  Eigen::VectorXd e0 = rng.normal_vector(layout.config_dim());
  e0 *= 0.3 / norm(e0);
  const Ball ball{qref, 0.5, norm};

  GainSchedule schedule = GainSchedule::uniform(layout, 0.5, 1.5);
  const KinematicRun run = integrate_kinematic_sampled(sys, (qref + e0).eval(), ball, schedule,
                                                       Strategy::offline, 4.5, 1.5 / 32.0);
  REQUIRE(run.sample_instants.size() == 4);
  for (std::size_t h = 0; h < run.sample_instants.size(); ++h) {
    const std::size_t idx = h * 32;
    REQUIRE(idx < run.times.size());
    CHECK(run.times[idx] == run.sample_instants[h]);
    CHECK(run.error_norms[idx] == run.sample_norms[h]);
  }
  // The held gain tags every node of the window that starts there.
  CHECK(run.k_values[0] == 0.5);
  CHECK(run.k_values[31] == 0.5);
  CHECK(run.k_values.back() == 0.5);
}

TEST_CASE("one sampled window retraces the rescaled auxiliary flow") {
  const FlyCrane4 sys;
  const BlockLayout& layout = sys.layout();
  Eigen::VectorXd d(5);
  d << 1.0, 1.0, 1.0, 1.0, 2.0;
  const WeightedNorm norm(layout, d, NormKind::inf);
  const Eigen::VectorXd qref = sys.reference_configuration();

  Rng rng(604);
  Rng sub = rng.substream(0);
  const Eigen::VectorXd e0 = sample_in_ball(sub, norm, 0.25);
  const Ball ball{qref, 0.3, norm};

  const double period = 1.5;
  const double k = 0.35 / period;  // modest held gain: k tau stays optimal-side
  GainSchedule schedule = GainSchedule::uniform(layout, k, period);

  const int n_sub = 128;
  const KinematicRun run = integrate_kinematic_sampled(sys, (qref + e0).eval(), ball, schedule,
                                                       Strategy::offline, period, period / n_sub);

  std::vector<double> taus;
  for (int j = 0; j <= n_sub; ++j) taus.push_back(k * (period * j / n_sub));
  const AuxTrajectory aux =
      simulate_auxiliary(sys, qref, e0, schedule.kbar_blocks, norm, 0.3, taus);

  REQUIRE(aux.recorded.size() == taus.size());
  double worst = 0.0;
  for (int j = 0; j <= n_sub; ++j) {
    const Eigen::VectorXd e_run = run.qs[j] - qref;
    worst = std::max(worst, (e_run - aux.recorded[j].second).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("kinematic runs abort on leaving the ball") {
  const LinearTallSystem sys = LinearTallSystem::default_instance();
  const BlockLayout& layout = sys.layout();
  const WeightedNorm norm = uniform_norm(layout, NormKind::two);
  const Eigen::VectorXd qref = Eigen::VectorXd::Zero(layout.config_dim());
  Eigen::VectorXd e0(3);
  e0 << 0.2, 0.1, -0.1;
  const Ball ball{qref, 1.5 * norm(e0), norm};

  // k T = 3 overshoots to -2 e0, twice the starting norm.
  GainSchedule schedule = GainSchedule::uniform(layout, 3.0, 1.0);
  CHECK_THROWS_AS((void)integrate_kinematic_sampled(sys, e0, ball, schedule, Strategy::offline,
                                                    1.0, 1.0 / 64.0),
                  RunError);

  // Starting outside the ball is rejected immediately.
  const Ball tiny{qref, 0.5 * norm(e0), norm};
  const Eigen::VectorXd gain = Eigen::VectorXd::Ones(layout.config_dim());
  CHECK_THROWS_AS((void)integrate_kinematic_continuous(sys, e0, tiny, gain, 1.0, 0.05), RunError);
}

TEST_CASE("dynamic loop matches the matrix exponential on the linear system") {
  const LinearTallSystem sys = LinearTallSystem::default_instance();
  const BlockLayout& layout = sys.layout();
  const int m = layout.config_dim();
  const WeightedNorm norm = uniform_norm(layout, NormKind::two);
  const Eigen::VectorXd qref = Eigen::VectorXd::Zero(m);
  const Ball ball{qref, 2.0, norm};

  DynamicParams params = DynamicParams::unit(layout);
  params.coriolis = CoriolisMode::zero;

  Rng rng(605);
  Eigen::VectorXd e0 = rng.normal_vector(m);
  e0 *= 0.4 / norm(e0);
  const Eigen::VectorXd qd0 = Eigen::VectorXd::Zero(m);

  const double k = 1.2;
  GainSchedule schedule = GainSchedule::uniform(layout, k, 1.0);
  const double alpha = 50.0;
  const double dt = 1.0 / (10.0 * alpha);

  const DynamicRun run = integrate_dynamic(sys, params, e0, qd0, ball, schedule,
                                           Strategy::continuous, alpha, 1.0, dt);
  REQUIRE_FALSE(run.diverged);
  REQUIRE_FALSE(run.ball_exited);

  // Constant Jacobian and zero Coriolis make the loop linear:
  //   d/dt [e; v] = [[0, I], [-alpha W K, -alpha W]] [e; v],  W = M^-1 A^T A.
  const Eigen::MatrixXd a = sys.jacobian(qref);
  const Eigen::MatrixXd mass = mass_matrix(sys, params, qref);
  const Eigen::MatrixXd w = mass.ldlt().solve((a.transpose() * a).eval());
  Eigen::MatrixXd sysmat = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  sysmat.topRightCorner(m, m).setIdentity();
  sysmat.bottomLeftCorner(m, m) = -alpha * k * w;
  sysmat.bottomRightCorner(m, m) = -alpha * w;

  Eigen::VectorXd x0(2 * m);
  x0 << e0, qd0;
  double worst = 0.0;
  for (std::size_t i = 0; i < run.times.size(); i += 25) {
    const Eigen::MatrixXd phi = (run.times[i] * sysmat).exp();
    const Eigen::VectorXd expect = phi * x0;
    worst = std::max(worst, (run.qs[i] - expect.head(m)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (run.qdots[i] - expect.tail(m)).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-6);

  // Force channel is consistent with its definition at the grid points.
  const std::size_t mid = run.times.size() / 2;
  const Eigen::VectorXd u_mid =
      continuous_command(sys, run.qs[mid], qref, schedule.scaled_expanded(layout));
  const Eigen::VectorXd f_expect = -alpha * (a * run.qdots[mid] - u_mid);
  CHECK((run.forces[mid] - f_expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("dynamic loop refuses unresolvably stiff steps") {
  const LinearTallSystem sys = LinearTallSystem::default_instance();
  const BlockLayout& layout = sys.layout();
  const Ball ball{Eigen::VectorXd::Zero(3), 1.0, uniform_norm(layout, NormKind::two)};
  const DynamicParams params = DynamicParams::unit(layout);
  GainSchedule schedule = GainSchedule::uniform(layout, 1.0, 1.0);
  Eigen::VectorXd q0(3);
  q0 << 0.1, 0.0, 0.0;
  const Eigen::VectorXd qd0 = Eigen::VectorXd::Zero(3);

  CHECK_THROWS_AS((void)integrate_dynamic(sys, params, q0, qd0, ball, schedule,
                                          Strategy::continuous, 100.0, 1.0, 0.01),
                  StructuralError);
  CHECK_THROWS_AS((void)integrate_dynamic(sys, params, q0, qd0, ball, schedule,
                                          Strategy::continuous, -3.0, 1.0, 1e-3),
                  StructuralError);
}

TEST_CASE("dynamic ball exit is flagged, not fatal") {
  const LinearTallSystem sys = LinearTallSystem::default_instance();
  const BlockLayout& layout = sys.layout();
  const WeightedNorm norm = uniform_norm(layout, NormKind::two);
  const Eigen::VectorXd qref = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd e0(3);
  e0 << 0.2, 0.1, -0.1;
  const Ball ball{qref, 1.2 * norm(e0), norm};
  DynamicParams params = DynamicParams::unit(layout);
  params.coriolis = CoriolisMode::zero;

  // Held gain k T = 3 overshoots past -e0 within the window.
  GainSchedule schedule = GainSchedule::uniform(layout, 3.0, 1.0);
  const double alpha = 200.0;
  const DynamicRun run = integrate_dynamic(sys, params, e0, Eigen::VectorXd::Zero(3), ball,
                                           schedule, Strategy::offline, alpha, 1.0, 5e-4);
  CHECK(run.ball_exited);
  CHECK_FALSE(run.diverged);
  CHECK(run.times.size() == 2001);
}

TEST_CASE("high force gain tracks the kinematic loop and tightens with alpha") {
  const LinearTallSystem sys = LinearTallSystem::default_instance();
  const BlockLayout& layout = sys.layout();
  const WeightedNorm norm = uniform_norm(layout, NormKind::two);
  const Eigen::VectorXd qref = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd e0(3);
  e0 << 0.3, -0.2, 0.15;
  const Ball ball{qref, 1.0, norm};
  DynamicParams params = DynamicParams::unit(layout);
  params.coriolis = CoriolisMode::zero;

  GainSchedule schedule = GainSchedule::uniform(layout, 1.0, 1.0);
  const Eigen::VectorXd gain = schedule.scaled_expanded(layout);
  const double t_end = 2.0;
  const double dt = 2.5e-4;  // resolves both alphas and divides t_end
  const KinematicRun kin = integrate_kinematic_continuous(sys, e0, ball, gain, t_end, dt);

  const auto sup_gap = [&](double alpha) {
    const DynamicRun dyn = integrate_dynamic(sys, params, e0, Eigen::VectorXd::Zero(3), ball,
                                             schedule, Strategy::continuous, alpha, t_end, dt);
    REQUIRE(dyn.times.size() == kin.times.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < dyn.times.size(); ++i) {
      gap = std::max(gap, (dyn.qs[i] - kin.qs[i]).cwiseAbs().maxCoeff());
    }
    return gap;
  };
  const double gap_low = sup_gap(40.0);
  const double gap_high = sup_gap(400.0);
  CHECK(gap_high < gap_low);
  CHECK(gap_high / gap_low <= 0.5);
  CHECK(gap_high <= 0.05);
}

TEST_CASE("assumption report on the linear system") {
  const LinearTallSystem sys = LinearTallSystem::default_instance();
  const BlockLayout& layout = sys.layout();
  const WeightedNorm norm = uniform_norm(layout, NormKind::two);
  const Ball ball{Eigen::VectorXd::Zero(3), 0.5, norm};
  const DynamicParams params = DynamicParams::unit(layout);

  const AssumptionReport rep = check_sp_assumptions(sys, params, ball, 1.0, 100, 31);
  CHECK(rep.equilibrium_ok);
  CHECK(rep.equilibrium_residual <= 1e-12);
  CHECK(rep.root_ok);
  CHECK(rep.root_residual <= 1e-9);
  CHECK(rep.isolation_margin > 0.0);
  CHECK(rep.boundedness_ok);
  CHECK(rep.reduced_ok);
  CHECK(rep.hurwitz_ok);
  CHECK(rep.hurwitz_margin > 0.0);
  CHECK(rep.all_ok());
  CHECK(rep.skipped == 0);

  const AssumptionReport bad = check_sp_assumptions(sys, params, ball, 0.0, 10, 31);
  CHECK_FALSE(bad.reduced_ok);
  CHECK_FALSE(bad.all_ok());
  CHECK(bad.hurwitz_ok);  // the layer does not care about k
}

TEST_CASE("assumption report on the aerial system ball") {
  const FlyCrane4 sys;
  const BlockLayout& layout = sys.layout();
  Eigen::VectorXd d(5);
  d << 1.0, 1.0, 1.0, 1.0, 2.0;
  const WeightedNorm norm(layout, d, NormKind::inf);
  const Ball ball{sys.reference_configuration(), 0.3, norm};
  const DynamicParams params = DynamicParams::unit(layout);

  const AssumptionReport rep = check_sp_assumptions(sys, params, ball, 0.8, 120, 33);
  CHECK(rep.all_ok());
  CHECK(rep.hurwitz_margin > 0.0);
  CHECK(rep.skipped == 0);
}
