#include "coopman/gain_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "coopman/auxiliary.hpp"
#include "coopman/control.hpp"
#include "coopman/errors.hpp"
#include "coopman/linalg.hpp"
#include "coopman/parallel.hpp"
#include "coopman/rng.hpp"

namespace coopman {

namespace {

constexpr double kSafetyInflation = 1.1;
constexpr double kMuStarTauFloor = 1e-3;

void check_gd_inputs(double mu, const Eigen::VectorXd& kbar, const Eigen::VectorXd& d) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw StructuralError("gain design: mu must be finite and nonnegative");
  }
  if (kbar.size() != d.size() || kbar.size() == 0) {
    throw StructuralError("gain design: block gains and weights must align");
  }
  for (int b = 0; b < kbar.size(); ++b) {
    if (!(kbar(b) > 0.0)) throw StructuralError("gain design: block gains must be positive");
    if (!(d(b) >= 1.0)) throw StructuralError("gain design: block weights must be >= 1");
  }
}

// Per-block coefficient multiplying |1 - tau kbar_b|.
double block_coeff(double d_b, GVariant variant) {
  return variant == GVariant::weighted ? 1.0 / (d_b * d_b) : 1.0;
}

}  // namespace

double g_eval(double tau, double mu, const Eigen::VectorXd& kbar_blocks,
              const Eigen::VectorXd& d_blocks, GVariant variant) {
  check_gd_inputs(mu, kbar_blocks, d_blocks);
  if (!(tau >= 0.0)) throw StructuralError("gain design: tau must be nonnegative");
  double mx = 0.0;
  for (int b = 0; b < kbar_blocks.size(); ++b) {
    mx = std::max(mx, block_coeff(d_blocks(b), variant) *
                          std::abs(1.0 - tau * kbar_blocks(b)));
  }
  return mx + mu * tau * tau;
}

OfflineDesign offline_design(double mu, const Eigen::VectorXd& kbar_blocks,
                             const Eigen::VectorXd& d_blocks, double period,
                             GVariant variant) {
  check_gd_inputs(mu, kbar_blocks, d_blocks);
  if (!(period > 0.0)) throw StructuralError("gain design: period must be positive");

  const int nb = static_cast<int>(kbar_blocks.size());
  std::vector<double> coeff(nb), kb(nb);
  for (int b = 0; b < nb; ++b) {
    coeff[b] = block_coeff(d_blocks(b), variant);
    kb[b] = kbar_blocks(b);
  }
  const auto g = [&](double tau) {
    double mx = 0.0;
    for (int b = 0; b < nb; ++b) mx = std::max(mx, coeff[b] * std::abs(1.0 - tau * kb[b]));
    return mx + mu * tau * tau;
  };

  // The minimizer of a max of V-shaped lines plus a parabola sits at a kink,
  // at a stationary point of an active descending branch, or where two
  // branches cross. Enumerate all of them and keep the best; a golden-section
  // sweep backs the enumeration up in case of numerically degenerate ties.
  std::vector<double> candidates;
  double tau_hi = 0.0;
  for (int b = 0; b < nb; ++b) {
    candidates.push_back(1.0 / kb[b]);
    tau_hi = std::max(tau_hi, 1.0 / kb[b]);
    if (mu > 0.0) {
      candidates.push_back(coeff[b] * kb[b] / (2.0 * mu));
      tau_hi = std::max(tau_hi, coeff[b] * kb[b] / (2.0 * mu));
    }
  }
  for (int i = 0; i < nb; ++i) {
    for (int j = i + 1; j < nb; ++j) {
      for (double si : {1.0, -1.0}) {
        for (double sj : {1.0, -1.0}) {
          const double num = si * coeff[i] - sj * coeff[j];
          const double den = si * coeff[i] * kb[i] - sj * coeff[j] * kb[j];
          if (den != 0.0) {
            const double tau = num / den;
            if (tau > 0.0 && std::isfinite(tau)) candidates.push_back(tau);
          }
        }
      }
    }
  }

  double tau_o = 0.0;
  double best = g(0.0);
  for (double tau : candidates) {
    if (!(tau >= 0.0)) continue;
    const double val = g(tau);
    if (val < best || (val == best && tau < tau_o)) {
      best = val;
      tau_o = tau;
    }
  }

  // Golden-section backstop over [0, 2 tau_hi].
  {
    double lo = 0.0, hi = 2.0 * tau_hi;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * std::max(1.0, hi); ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = g(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = g(x2);
      }
    }
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < best) {
      best = g(mid);
      tau_o = mid;
    }
  }

  if (!(tau_o > 0.0) || !(best < 1.0)) {
    throw RunError("gain design: no contracting window found (rho = " +
                   std::to_string(best) + ")");
  }

  // Root of g = 1 on the increasing side: expand then bisect.
  double lo = tau_o, hi = std::max(2.0 * tau_o, tau_hi);
  int guard = 0;
  while (g(hi) < 1.0 && guard++ < 200) hi *= 2.0;
  if (g(hi) < 1.0) {
    throw RunError("gain design: boundary-return time not bracketed");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  OfflineDesign design;
  design.mu = mu;
  design.tau_o_bar = tau_o;
  design.rho = best;
  design.tau_s_bar = 0.5 * (lo + hi);
  design.k_star = tau_o / period;
  design.period = period;
  return design;
}

ABEstimate estimate_ab(const KinematicSystem& sys, const Ball& ball,
                       const Eigen::VectorXd& kbar_blocks, std::uint64_t n_samples,
                       std::uint64_t seed) {
  const BlockLayout& layout = sys.layout();
  GainSchedule gains;
  gains.kbar_blocks = kbar_blocks;
  const Eigen::VectorXd kbar_diag = gains.expanded(layout);
  sys.check_domain(ball.center);
  const WeightedNorm& norm = ball.norm;

  const Rng master(seed);
  const auto sample = [&](std::uint64_t i, Eigen::ArrayXd& out) -> bool {
    Rng sub = master.substream(i);
    const Eigen::VectorXd e = sample_in_ball(sub, norm, ball.radius);
    const Eigen::VectorXd ep = sample_in_ball(sub, norm, ball.radius);
    const double norm_e = norm(e);
    if (norm_e < 1e-12) return false;
    try {
      const Eigen::MatrixXd a_e = sys.jacobian(ball.center + e);
      const Eigen::MatrixXd pinv_ep = pseudo_inverse(sys.jacobian(ball.center + ep));
      out(0) = norm.induced(pinv_ep * a_e * kbar_diag.asDiagonal());

      const Eigen::VectorXd v = a_e * kbar_diag.cwiseProduct(e);
      const Eigen::MatrixXd jf = central_difference_jacobian(
          [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            return -pseudo_inverse_apply(sys.jacobian(ball.center + x), v);
          },
          ep, 1e-6);
      out(1) = norm.induced(jf) / norm_e;
      return true;
    } catch (const SingularityError&) {
      return false;
    } catch (const DomainError&) {
      return false;
    }
  };

  const SampleMax reduced = max_over_samples(n_samples, 2, sample);
  ABEstimate est;
  est.a_raw = reduced.values(0);
  est.b_raw = std::max(0.0, reduced.values(1));
  est.a = kSafetyInflation * est.a_raw;
  est.b = kSafetyInflation * est.b_raw;
  est.skipped = reduced.skipped;
  est.n_samples = n_samples;
  est.seed = seed;
  if (!(est.a_raw > 0.0) || !std::isfinite(est.a_raw) || !std::isfinite(est.b_raw)) {
    throw RunError("gain design: sensitivity sampling produced no usable samples");
  }
  return est;
}

double mu_from_ab(double a, double b, double radius) {
  if (!(a > 0.0) || !(b >= 0.0) || !(radius > 0.0)) {
    throw StructuralError("gain design: mu needs a > 0, b >= 0, radius > 0");
  }
  return 0.5 * a * b * radius;
}

MuStarEstimate mc_mu_star(const KinematicSystem& sys, const Ball& ball,
                          const Eigen::VectorXd& kbar_blocks, std::uint64_t n_traj,
                          std::uint64_t seed) {
  const BlockLayout& layout = sys.layout();
  GainSchedule gains;
  gains.kbar_blocks = kbar_blocks;
  const Eigen::VectorXd kbar_diag = gains.expanded(layout);
  sys.check_domain(ball.center);
  const WeightedNorm& norm = ball.norm;

  // Dense small-tau coverage: the remainder ratio can peak either near zero
  // or out where the flow bends, so record a geometric ladder on top of the
  // integrator's own grid.
  std::vector<double> ladder;
  for (double t = kMuStarTauFloor; t < 0.3; t *= 1.25) ladder.push_back(t);

  const Rng master(seed);
  const auto sample = [&](std::uint64_t i, Eigen::ArrayXd& out) -> bool {
    Rng sub = master.substream(i);
    const Eigen::VectorXd e_h = sample_in_ball(sub, norm, ball.radius);
    const double norm0 = norm(e_h);
    if (norm0 < 1e-9) return false;
    try {
      const AuxTrajectory aux =
          simulate_auxiliary(sys, ball.center, e_h, kbar_blocks, norm, ball.radius, ladder);
      double worst = 0.0;
      const double tau_cap = std::min(aux.tau_s, aux.tau_max);
      const auto scan = [&](double tau, const Eigen::VectorXd& state) {
        if (tau < kMuStarTauFloor || tau > tau_cap) return;
        const Eigen::VectorXd linear = e_h - tau * kbar_diag.cwiseProduct(e_h);
        worst = std::max(worst, norm(state - linear) / (norm0 * tau * tau));
      };
      for (std::size_t j = 0; j < aux.taus.size(); ++j) scan(aux.taus[j], aux.states[j]);
      for (const auto& rec : aux.recorded) scan(rec.first, rec.second);
      out(0) = worst;
      return true;
    } catch (const SingularityError&) {
      return false;
    } catch (const DomainError&) {
      return false;
    }
  };

  const SampleMax reduced = max_over_samples(n_traj, 1, sample);
  MuStarEstimate est;
  est.mu_star = std::max(0.0, reduced.values(0));
  est.n_traj = n_traj;
  est.skipped = reduced.skipped;
  est.seed = seed;
  if (reduced.skipped >= n_traj) {
    throw RunError("gain design: remainder sampling produced no usable trajectories");
  }
  return est;
}

}  // namespace coopman
