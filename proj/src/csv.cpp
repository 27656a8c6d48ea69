#include "coopman/csv.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "coopman/errors.hpp"

namespace coopman {

std::string format_sig12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

void write_rows(const std::string& path, const std::vector<double>& times,
                const std::vector<Eigen::VectorXd>& qs, const std::vector<double>& norms,
                const std::vector<double>& ks, const Ball& ball) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("csv: cannot open '" + path + "' for writing");

  const int m = static_cast<int>(qs.empty() ? 0 : qs.front().size());
  out << "t,k_h,norm_e";
  for (int j = 1; j <= m; ++j) out << ",q_" << j;
  out << ",in_ball\n";

  const double limit = ball.radius * (1.0 + kBallExitSlack);
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << format_sig12(times[i]) << ',' << format_sig12(ks[i]) << ','
        << format_sig12(norms[i]);
    for (int j = 0; j < m; ++j) out << ',' << format_sig12(qs[i](j));
    out << ',' << (norms[i] <= limit ? 1 : 0) << '\n';
  }
  if (!out) throw RunError("csv: write to '" + path + "' failed");
}

}  // namespace

void write_run_csv(const std::string& path, const KinematicRun& run, const Ball& ball) {
  write_rows(path, run.times, run.qs, run.error_norms, run.k_values, ball);
}

void write_run_csv(const std::string& path, const DynamicRun& run, const Ball& ball) {
  write_rows(path, run.times, run.qs, run.error_norms, run.k_values, ball);
}

}  // namespace coopman
