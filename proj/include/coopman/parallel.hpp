#ifndef COOPMAN_PARALLEL_HPP
#define COOPMAN_PARALLEL_HPP

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace coopman {

/// Componentwise maxima of per-sample values, plus how many samples opted out.
struct SampleMax {
  Eigen::ArrayXd values;
  std::uint64_t skipped = 0;
};

/// Evaluates fn(i, out) for i in [0, n) and reduces the filled `out` arrays
/// (size n_values each) with a componentwise max. fn returns false to skip a
/// sample (the skip is counted, not an error). Samples are distributed over
/// workers in contiguous chunks; max is associative and commutative, so the
/// result is identical for any worker count, including 1. workers = 0 picks
/// the hardware count. Exceptions from fn propagate to the caller.
SampleMax max_over_samples(std::uint64_t n, int n_values,
                           const std::function<bool(std::uint64_t, Eigen::ArrayXd&)>& fn,
                           int workers = 0);

}  // namespace coopman

#endif
