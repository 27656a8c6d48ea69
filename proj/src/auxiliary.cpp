#include "coopman/auxiliary.hpp"

#include <algorithm>
#include <cmath>

#include "coopman/control.hpp"
#include "coopman/errors.hpp"
#include "coopman/linalg.hpp"

namespace coopman {

namespace {

constexpr double kGridFraction = 1e-3;   // node spacing as a fraction of the horizon
constexpr double kGoldenTol = 1e-6;      // tau tolerance of the golden stage
constexpr double kTieRel = 1e-12;        // active-set detection for the inf norm

class AuxFlow {
 public:
  AuxFlow(const KinematicSystem& sys, Eigen::VectorXd qref, Eigen::VectorXd v)
      : sys_(sys), qref_(std::move(qref)), v_(std::move(v)) {}

  Eigen::VectorXd operator()(const Eigen::VectorXd& eprime) const {
    return -pseudo_inverse_apply(sys_.jacobian(qref_ + eprime), v_);
  }

 private:
  const KinematicSystem& sys_;
  Eigen::VectorXd qref_;
  Eigen::VectorXd v_;
};

Eigen::VectorXd rk4_step(const AuxFlow& f, const Eigen::VectorXd& e, double h) {
  const Eigen::VectorXd k1 = f(e);
  const Eigen::VectorXd k2 = f(e + (0.5 * h) * k1);
  const Eigen::VectorXd k3 = f(e + (0.5 * h) * k2);
  const Eigen::VectorXd k4 = f(e + h * k3);
  return e + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Right derivative of tau -> ||e(tau)|| along the direction de.
double norm_right_derivative(const WeightedNorm& norm, const Eigen::VectorXd& e,
                             const Eigen::VectorXd& de) {
  const Eigen::VectorXd& w = norm.component_weights();
  if (norm.kind() == NormKind::two) {
    double dot = 0.0, sq = 0.0;
    for (int j = 0; j < e.size(); ++j) {
      const double we = w(j) * e(j);
      dot += we * (w(j) * de(j));
      sq += we * we;
    }
    return sq > 0.0 ? dot / std::sqrt(sq) : norm(de);
  }
  double mx = 0.0;
  for (int j = 0; j < e.size(); ++j) mx = std::max(mx, std::abs(w(j) * e(j)));
  double deriv = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < e.size(); ++j) {
    const double we = w(j) * e(j);
    if (std::abs(we) < mx * (1.0 - kTieRel)) continue;
    const double slope = we > 0.0  ? w(j) * de(j)
                         : we < 0.0 ? -w(j) * de(j)
                                    : std::abs(w(j) * de(j));
    deriv = std::max(deriv, slope);
  }
  return deriv;
}

}  // namespace

AuxTrajectory simulate_auxiliary(const KinematicSystem& sys, const Eigen::VectorXd& qref,
                                 const Eigen::VectorXd& e_h,
                                 const Eigen::VectorXd& kbar_blocks, const WeightedNorm& norm,
                                 double radius, const std::vector<double>& record_at) {
  const BlockLayout& layout = sys.layout();
  layout.check_config_size(e_h, "e_h");
  sys.check_domain(qref);

  GainSchedule gains;
  gains.kbar_blocks = kbar_blocks;
  const Eigen::VectorXd kbar_diag = gains.expanded(layout);

  AuxTrajectory traj;
  traj.initial_norm = norm(e_h);
  if (!(traj.initial_norm < radius)) {
    throw StructuralError("auxiliary flow: initial error is not inside the working ball");
  }

  const Eigen::VectorXd& d = norm.block_weights();
  double rate = std::numeric_limits<double>::infinity();
  for (int b = 0; b < kbar_blocks.size(); ++b) {
    rate = std::min(rate, kbar_blocks(b) / (d(b) * d(b)));
  }
  traj.tau_max = 3.0 / rate;

  traj.taus.push_back(0.0);
  traj.states.push_back(e_h);
  traj.norms.push_back(traj.initial_norm);
  for (double t : record_at) {
    if (t == 0.0) traj.recorded.emplace_back(0.0, e_h);
  }
  if (traj.initial_norm == 0.0) {
    traj.min_norm = 0.0;
    return traj;  // stationary: tau_o = 0, no boundary hit
  }

  const AuxFlow flow(sys, qref, sys.jacobian(qref + e_h) * kbar_diag.cwiseProduct(e_h));
  const double dtau = kGridFraction * traj.tau_max;

  std::vector<double> pending(record_at.begin(), record_at.end());
  std::sort(pending.begin(), pending.end());
  std::size_t next_rec = 0;
  while (next_rec < pending.size() && pending[next_rec] <= 0.0) ++next_rec;

  // Evaluates the state at any tau inside the stored range with one partial
  // RK4 step from the nearest node on the left.
  const auto state_at = [&](double tau) -> Eigen::VectorXd {
    auto it = std::upper_bound(traj.taus.begin(), traj.taus.end(), tau);
    std::size_t j = (it == traj.taus.begin()) ? 0 : (it - traj.taus.begin() - 1);
    const double h = tau - traj.taus[j];
    if (h <= 0.0) return traj.states[j];
    return rk4_step(flow, traj.states[j], h);
  };

  double t = 0.0;
  Eigen::VectorXd e = e_h;
  bool truncated = false;
  while (t < traj.tau_max * (1.0 - 1e-12)) {
    double t_next = std::min(t + dtau, traj.tau_max);
    bool is_record = false;
    if (next_rec < pending.size() && pending[next_rec] < t_next) {
      t_next = pending[next_rec];
      is_record = true;
    }
    Eigen::VectorXd e_next;
    try {
      e_next = rk4_step(flow, e, t_next - t);
    } catch (const SingularityError& err) {
      traj.singular_flagged = true;
      traj.flag_reason = err.what();
    } catch (const DomainError& err) {
      traj.singular_flagged = true;
      traj.flag_reason = err.what();
    }
    if (!traj.singular_flagged && !e_next.allFinite()) {
      traj.singular_flagged = true;
      traj.flag_reason = "auxiliary flow diverged to non-finite values";
    }
    if (traj.singular_flagged) {
      traj.tau_s = t;  // last valid time
      truncated = true;
      break;
    }

    const double nrm = norm(e_next);
    traj.taus.push_back(t_next);
    traj.states.push_back(e_next);
    traj.norms.push_back(nrm);
    if (is_record) {
      traj.recorded.emplace_back(t_next, e_next);
      ++next_rec;
    }

    if (nrm >= traj.initial_norm) {
      // Refine the boundary crossing inside (t, t_next].
      double lo = t, hi = t_next;
      for (int it2 = 0; it2 < 60 && (hi - lo) > 1e-15 * traj.tau_max; ++it2) {
        const double mid = 0.5 * (lo + hi);
        if (norm(state_at(mid)) >= traj.initial_norm) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      traj.tau_s = hi;
      traj.boundary_hit = true;
      break;
    }
    t = t_next;
    e = e_next;
  }

  // Locate the norm minimizer on the grid, then refine.
  std::size_t jmin = 0;
  for (std::size_t j = 1; j < traj.norms.size(); ++j) {
    if (traj.norms[j] < traj.norms[jmin]) jmin = j;
  }
  traj.tau_o = traj.taus[jmin];
  traj.min_norm = traj.norms[jmin];
  if (jmin == 0) return traj;  // flow points outward immediately; keep tau_o = 0

  const double upper = std::min(traj.tau_s, traj.tau_max);
  double lo = traj.taus[jmin - 1];
  double hi = (jmin + 1 < traj.taus.size()) ? traj.taus[jmin + 1]
                                            : std::min(traj.taus[jmin], upper);
  hi = std::min(hi, upper);
  if (hi <= lo) return traj;

  const auto norm_at = [&](double tau) { return norm(state_at(tau)); };

  try {
    // Golden-section shrink of [lo, hi] around the minimum.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = norm_at(x1), f2 = norm_at(x2);
    while (hi - lo > kGoldenTol) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = norm_at(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = norm_at(x2);
      }
    }

    // Polish: bisect on the sign of the norm's right derivative, which is
    // negative left of the minimizer and positive right of it. This sharpens
    // the golden estimate to near machine precision, enough for the
    // one-period deadbeat of constant-Jacobian systems to survive k = tau_o/T.
    double blo = std::max(traj.taus[jmin - 1], lo - kGoldenTol);
    double bhi = std::min(upper, hi + kGoldenTol);
    const auto deriv_sign = [&](double tau) {
      const Eigen::VectorXd state = state_at(tau);
      return norm_right_derivative(norm, state, flow(state));
    };
    if (deriv_sign(blo) < 0.0 && deriv_sign(bhi) > 0.0) {
      for (int it2 = 0; it2 < 80 && (bhi - blo) > 1e-16 * std::max(1.0, bhi); ++it2) {
        const double mid = 0.5 * (blo + bhi);
        if (deriv_sign(mid) < 0.0) {
          blo = mid;
        } else {
          bhi = mid;
        }
      }
      traj.tau_o = 0.5 * (blo + bhi);
    } else {
      traj.tau_o = 0.5 * (lo + hi);
    }
    traj.tau_o = std::min(traj.tau_o, upper);
    traj.min_norm = norm_at(traj.tau_o);
  } catch (const SingularityError&) {
    // Keep the grid minimizer; refinement is best-effort.
  } catch (const DomainError&) {
  }

  if (truncated && traj.min_norm > traj.norms[jmin]) {
    traj.tau_o = traj.taus[jmin];
    traj.min_norm = traj.norms[jmin];
  }
  return traj;
}

}  // namespace coopman
