#include "coopman/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "coopman/auxiliary.hpp"
#include "coopman/errors.hpp"
#include "coopman/linalg.hpp"
#include "coopman/rng.hpp"

namespace coopman {

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::continuous: return "continuous";
    case Strategy::offline: return "offline";
    case Strategy::online: return "online";
  }
  throw StructuralError("unknown strategy");
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "continuous") return Strategy::continuous;
  if (name == "offline") return Strategy::offline;
  if (name == "online") return Strategy::online;
  throw StructuralError("unknown strategy '" + name + "' (continuous, offline, online)");
}

namespace {

// Number of steps covering `total` at nominal step `dt`, requiring the
// division to be exact to 1e-9 relative so switching instants are grid nodes.
long long snap_steps(double total, double dt, const char* what) {
  if (!(total > 0.0) || !(dt > 0.0)) {
    throw StructuralError(std::string(what) + ": horizon and step must be positive");
  }
  const long long n = std::llround(total / dt);
  if (n < 1 || std::abs(static_cast<double>(n) * dt - total) > 1e-9 * total) {
    throw StructuralError(std::string(what) + ": step must divide the horizon exactly");
  }
  return n;
}

std::string state_dump(double t, const Eigen::VectorXd& q) {
  std::ostringstream os;
  os << "t = " << t << ", q = [";
  for (int i = 0; i < q.size(); ++i) os << (i ? ", " : "") << q(i);
  os << "]";
  return os.str();
}

// One RK4 step of qdot = A^+(q) u with u held fixed.
Eigen::VectorXd rk4_held(const KinematicSystem& sys, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& u, double dt) {
  const auto f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return pseudo_inverse_apply(sys.jacobian(x), u);
  };
  const Eigen::VectorXd k1 = f(q);
  const Eigen::VectorXd k2 = f(q + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = f(q + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = f(q + dt * k3);
  return q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_inside(const Ball& ball, const Eigen::VectorXd& q, double t, const char* what) {
  const double nrm = ball.error_norm(q);
  if (nrm > ball.radius * (1.0 + kBallExitSlack)) {
    throw RunError(std::string(what) + ": trajectory left the working ball (norm " +
                   std::to_string(nrm) + " > radius " + std::to_string(ball.radius) + ") at " +
                   state_dump(t, q));
  }
}

}  // namespace

KinematicRun integrate_kinematic_continuous(const KinematicSystem& sys,
                                            const Eigen::VectorXd& q0, const Ball& ball,
                                            const Eigen::VectorXd& gain_diag, double t_end,
                                            double dt) {
  const BlockLayout& layout = sys.layout();
  layout.check_config_size(q0, "q0");
  layout.check_config_size(gain_diag, "gain_diag");
  sys.check_domain(q0);
  check_inside(ball, q0, 0.0, "continuous run");

  const long long n = snap_steps(t_end, dt, "continuous run");
  const double h = t_end / static_cast<double>(n);

  KinematicRun run;
  run.strategy = Strategy::continuous;
  run.dt = h;
  run.times.reserve(n + 1);
  run.qs.reserve(n + 1);
  run.error_norms.reserve(n + 1);
  run.k_values.reserve(n + 1);

  Eigen::VectorXd q = q0;
  run.times.push_back(0.0);
  run.qs.push_back(q);
  run.error_norms.push_back(ball.error_norm(q));
  run.k_values.push_back(0.0);

  const auto f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return pseudo_inverse_apply(sys.jacobian(x),
                                continuous_command(sys, x, ball.center, gain_diag));
  };
  for (long long i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * h;
    try {
      const Eigen::VectorXd k1 = f(q);
      const Eigen::VectorXd k2 = f(q + 0.5 * h * k1);
      const Eigen::VectorXd k3 = f(q + 0.5 * h * k2);
      const Eigen::VectorXd k4 = f(q + h * k3);
      q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const SingularityError& err) {
      throw RunError(std::string("continuous run: singular Jacobian (") + err.what() + ") at " +
                     state_dump(t, q));
    } catch (const DomainError& err) {
      throw RunError(std::string("continuous run: left the kinematic domain (") + err.what() +
                     ") at " + state_dump(t, q));
    }
    check_inside(ball, q, t + h, "continuous run");
    run.times.push_back(static_cast<double>(i + 1) * h);
    run.qs.push_back(q);
    run.error_norms.push_back(ball.error_norm(q));
    run.k_values.push_back(0.0);
  }
  return run;
}

KinematicRun integrate_kinematic_sampled(const KinematicSystem& sys, const Eigen::VectorXd& q0,
                                         const Ball& ball, const GainSchedule& schedule,
                                         Strategy strategy, double t_end, double dt) {
  if (strategy == Strategy::continuous) {
    throw StructuralError("sampled run: strategy must be offline or online");
  }
  const BlockLayout& layout = sys.layout();
  layout.check_config_size(q0, "q0");
  schedule.validate(layout);
  sys.check_domain(q0);
  check_inside(ball, q0, 0.0, "sampled run");

  const long long n_sub = snap_steps(schedule.period, dt, "sampled run (period)");
  const long long n_per = snap_steps(t_end, schedule.period, "sampled run (horizon)");
  const double h = schedule.period / static_cast<double>(n_sub);
  const Eigen::VectorXd kbar_diag = schedule.expanded(layout);

  KinematicRun run;
  run.strategy = strategy;
  run.dt = h;
  run.period = schedule.period;
  const long long n_total = n_sub * n_per;
  run.times.reserve(n_total + 1);
  run.qs.reserve(n_total + 1);
  run.error_norms.reserve(n_total + 1);
  run.k_values.reserve(n_total + 1);

  Eigen::VectorXd q = q0;
  run.times.push_back(0.0);
  run.qs.push_back(q);
  run.error_norms.push_back(ball.error_norm(q));
  run.k_values.push_back(0.0);

  for (long long per = 0; per < n_per; ++per) {
    const double t_h = static_cast<double>(per * n_sub) * h;
    run.sample_instants.push_back(t_h);
    run.sample_norms.push_back(ball.error_norm(q));

    double k_h = schedule.k;
    Eigen::VectorXd u_h;
    if (strategy == Strategy::offline) {
      u_h = held_command(sys, q, ball.center, schedule.k, kbar_diag);
    } else {
      OnlineCommand cmd;
      try {
        cmd = online_command(sys, q, ball.center, schedule, ball.norm, ball.radius);
      } catch (const StructuralError& err) {
        throw RunError(std::string("sampled run: online window rejected (") + err.what() +
                       ") at " + state_dump(t_h, q));
      }
      k_h = cmd.k_h;
      u_h = cmd.u;
      if (cmd.fallback_used) ++run.fallback_windows;
    }
    run.k_values.back() = k_h;  // gain applied from this node onward

    for (long long j = 0; j < n_sub; ++j) {
      const double t = static_cast<double>(per * n_sub + j) * h;
      try {
        q = rk4_held(sys, q, u_h, h);
      } catch (const SingularityError& err) {
        throw RunError(std::string("sampled run: singular Jacobian (") + err.what() + ") at " +
                       state_dump(t, q));
      } catch (const DomainError& err) {
        throw RunError(std::string("sampled run: left the kinematic domain (") + err.what() +
                       ") at " + state_dump(t, q));
      }
      check_inside(ball, q, t + h, "sampled run");
      run.times.push_back(static_cast<double>(per * n_sub + j + 1) * h);
      run.qs.push_back(q);
      run.error_norms.push_back(ball.error_norm(q));
      run.k_values.push_back(k_h);
    }
  }
  run.sample_instants.push_back(static_cast<double>(n_total) * h);
  run.sample_norms.push_back(ball.error_norm(q));
  return run;
}

DynamicRun integrate_dynamic(const KinematicSystem& sys, const DynamicParams& params,
                             const Eigen::VectorXd& q0, const Eigen::VectorXd& qdot0,
                             const Ball& ball, const GainSchedule& schedule, Strategy strategy,
                             double alpha, double t_end, double dt) {
  const BlockLayout& layout = sys.layout();
  layout.check_config_size(q0, "q0");
  layout.check_config_size(qdot0, "qdot0");
  params.validate(layout);
  schedule.validate(layout);
  sys.check_domain(q0);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw StructuralError("dynamic run: force gain alpha must be positive");
  }
  const double epsilon = 1.0 / alpha;
  if (dt > epsilon / 10.0 * (1.0 + 1e-12)) {
    throw StructuralError(
        "dynamic run: step too coarse for the fast time scale (need dt <= 1/(10 alpha))");
  }

  const long long n_total = snap_steps(t_end, dt, "dynamic run (horizon)");
  const double h = t_end / static_cast<double>(n_total);
  long long n_sub = n_total;
  if (strategy != Strategy::continuous) {
    n_sub = snap_steps(schedule.period, dt, "dynamic run (period)");
    (void)snap_steps(t_end, schedule.period, "dynamic run (horizon vs period)");
    n_sub = std::llround(schedule.period / h);
  }

  const Eigen::VectorXd scaled = schedule.scaled_expanded(layout);
  const Eigen::VectorXd kbar_diag = schedule.expanded(layout);

  DynamicRun run;
  run.strategy = strategy;
  run.alpha = alpha;
  run.epsilon = epsilon;
  run.dt = h;
  run.period = strategy == Strategy::continuous ? 0.0 : schedule.period;

  Eigen::VectorXd q = q0;
  Eigen::VectorXd qd = qdot0;
  Eigen::VectorXd u_h = Eigen::VectorXd::Zero(layout.workspace_dim());
  double k_now = schedule.k;

  // u at integrator stage states: the frozen window command for sampled
  // strategies, or the instantaneous continuous law.
  const auto command_at = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (strategy == Strategy::continuous) return continuous_command(sys, x, ball.center, scaled);
    return u_h;
  };
  const auto accel = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const Eigen::MatrixXd a = sys.jacobian(x);
    const Eigen::VectorXd force = -alpha * (a * v - command_at(x));
    const Eigen::MatrixXd m = mass_matrix(sys, params, x);
    const Eigen::MatrixXd c = coriolis_matrix(sys, params, x, v);
    return m.ldlt().solve(a.transpose() * force - c * v);
  };
  const auto record = [&](double t) {
    run.times.push_back(t);
    run.qs.push_back(q);
    run.qdots.push_back(qd);
    run.error_norms.push_back(ball.error_norm(q));
    run.k_values.push_back(k_now);
    const Eigen::MatrixXd a = sys.jacobian(q);
    run.forces.push_back(-alpha * (a * qd - command_at(q)));
    if (run.error_norms.back() > ball.radius * (1.0 + kBallExitSlack)) run.ball_exited = true;
  };

  record(0.0);
  for (long long i = 0; i < n_total; ++i) {
    const double t = static_cast<double>(i) * h;
    if (strategy != Strategy::continuous && i % n_sub == 0) {
      run.sample_instants.push_back(t);
      run.sample_norms.push_back(ball.error_norm(q));
      const Eigen::VectorXd e_h = q - ball.center;
      if (strategy == Strategy::offline) {
        k_now = schedule.k;
        u_h = held_command(sys, q, ball.center, schedule.k, kbar_diag);
      } else {
        const double nrm = ball.norm(e_h);
        if (nrm == 0.0) {
          k_now = 0.0;
          u_h.setZero();
        } else if (nrm < ball.radius) {
          const OnlineCommand cmd =
              online_command(sys, q, ball.center, schedule, ball.norm, ball.radius);
          k_now = cmd.k_h;
          u_h = cmd.u;
          if (cmd.fallback_used) ++run.fallback_windows;
        } else {
          // Outside the certified ball the rollout is undefined; hold the
          // offline gain and keep going.
          k_now = schedule.k;
          u_h = held_command(sys, q, ball.center, schedule.k, kbar_diag);
          ++run.fallback_windows;
        }
      }
      run.k_values.back() = k_now;
    }

    try {
      const Eigen::VectorXd k1q = qd;
      const Eigen::VectorXd k1v = accel(q, qd);
      const Eigen::VectorXd k2q = qd + 0.5 * h * k1v;
      const Eigen::VectorXd k2v = accel(q + 0.5 * h * k1q, k2q);
      const Eigen::VectorXd k3q = qd + 0.5 * h * k2v;
      const Eigen::VectorXd k3v = accel(q + 0.5 * h * k2q, k3q);
      const Eigen::VectorXd k4q = qd + h * k3v;
      const Eigen::VectorXd k4v = accel(q + h * k3q, k4q);
      q = q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
      qd = qd + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    } catch (const SingularityError& err) {
      throw RunError(std::string("dynamic run: inertia matrix near singular (") + err.what() +
                     ") at " + state_dump(t, q));
    } catch (const DomainError&) {
      run.diverged = true;
      break;
    }
    if (!q.allFinite() || !qd.allFinite()) {
      run.diverged = true;
      break;
    }
    record(static_cast<double>(i + 1) * h);
  }
  if (strategy != Strategy::continuous && !run.diverged) {
    run.sample_instants.push_back(static_cast<double>(n_total) * h);
    run.sample_norms.push_back(ball.error_norm(q));
  }
  return run;
}

AssumptionReport check_sp_assumptions(const KinematicSystem& sys, const DynamicParams& params,
                                      const Ball& ball, double k, std::uint64_t n_samples,
                                      std::uint64_t seed) {
  const BlockLayout& layout = sys.layout();
  params.validate(layout);
  sys.check_domain(ball.center);

  AssumptionReport report;
  report.n_samples = n_samples;
  report.k = k;
  report.reduced_rate = k;
  report.reduced_ok = k > 0.0;

  // Exact equilibrium at (e, qdot) = (0, 0): zero command, zero force, zero
  // acceleration.
  {
    const Eigen::VectorXd gain =
        Eigen::VectorXd::Constant(layout.config_dim(), std::max(k, 1.0));
    const Eigen::VectorXd u = continuous_command(sys, ball.center, ball.center, gain);
    const Eigen::MatrixXd m = mass_matrix(sys, params, ball.center);
    const Eigen::VectorXd qdd = m.ldlt().solve(sys.jacobian(ball.center).transpose() * u);
    report.equilibrium_residual = u.cwiseAbs().maxCoeff() + qdd.cwiseAbs().maxCoeff();
    report.equilibrium_ok = report.equilibrium_residual <= 1e-12;
  }

  double root_res = 0.0;
  double iso = std::numeric_limits<double>::infinity();
  double sup_a = 0.0, sup_pinv = 0.0, sup_minv = 0.0;
  double hurwitz = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd gain_k = Eigen::VectorXd::Constant(layout.config_dim(), k);

  const Rng master(seed);
  std::uint64_t used = 0;
  for (std::uint64_t i = 0; i <= n_samples; ++i) {
    Eigen::VectorXd q;
    if (i == 0) {
      q = ball.center;  // always include the reference itself
    } else {
      Rng sub = master.substream(i - 1);
      q = ball.center + sample_in_ball(sub, ball.norm, ball.radius);
    }
    try {
      const Eigen::MatrixXd a = sys.jacobian(q);
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
      const double smin = svd.singularValues()(svd.singularValues().size() - 1);
      const double smax = svd.singularValues()(0);
      if (smin < kRankTolerance * smax) {
        ++report.skipped;
        continue;
      }

      // Algebraic root of the fast subsystem: qdot = -k e zeroes the force.
      const Eigen::VectorXd e = q - ball.center;
      const Eigen::VectorXd u = continuous_command(sys, q, ball.center, gain_k);
      root_res = std::max(root_res, (a * (-k * e) - u).cwiseAbs().maxCoeff());

      iso = std::min(iso, smin * smin);
      sup_a = std::max(sup_a, smax);
      sup_pinv = std::max(sup_pinv, 1.0 / smin);

      const Eigen::MatrixXd m = mass_matrix(sys, params, q);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> meig(m);
      sup_minv = std::max(sup_minv, 1.0 / meig.eigenvalues().minCoeff());

      // Eigenvalues of M^-1 A^T A are the generalized eigenvalues of
      // (A^T A, M); all real since both are symmetric and M > 0.
      const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gen(
          (a.transpose() * a).eval(), m);
      hurwitz = std::min(hurwitz, gen.eigenvalues().minCoeff());
      ++used;
    } catch (const SingularityError&) {
      ++report.skipped;
    } catch (const DomainError&) {
      ++report.skipped;
    }
  }
  if (used == 0) {
    throw RunError("assumption check: every sampled configuration was degenerate");
  }

  report.root_residual = root_res;
  report.isolation_margin = iso;
  report.root_ok = root_res <= 1e-9 && iso > 0.0;
  report.sup_jacobian = sup_a;
  report.sup_pinv = sup_pinv;
  report.sup_mass_inverse = sup_minv;
  report.boundedness_ok =
      std::isfinite(sup_a) && std::isfinite(sup_pinv) && std::isfinite(sup_minv);
  report.hurwitz_margin = hurwitz;
  report.hurwitz_ok = hurwitz > 0.0;
  return report;
}

}  // namespace coopman
