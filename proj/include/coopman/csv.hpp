#ifndef COOPMAN_CSV_HPP
#define COOPMAN_CSV_HPP

#include <string>

#include "coopman/sim.hpp"
#include "coopman/weighted_norm.hpp"

namespace coopman {

/// A double rendered with 12 significant digits ("%.12g", C locale), the
/// fixed numeric format of every CSV cell so files are byte-stable.
std::string format_sig12(double x);

/// Writes `t, k_h, norm_e, q_1..q_m, in_ball` rows, comma separated, LF line
/// endings, one row per grid node. k_h is the gain applied from that node on
/// (0 for the continuous kinematic law), norm_e the weighted error norm, and
/// in_ball 1 while the state is inside the run's working ball.
void write_run_csv(const std::string& path, const KinematicRun& run, const Ball& ball);
void write_run_csv(const std::string& path, const DynamicRun& run, const Ball& ball);

}  // namespace coopman

#endif
