#include "coopman/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

#include "coopman/errors.hpp"

namespace coopman {

namespace {

SampleMax run_range(std::uint64_t begin, std::uint64_t end, int n_values,
                    const std::function<bool(std::uint64_t, Eigen::ArrayXd&)>& fn) {
  SampleMax acc;
  acc.values = Eigen::ArrayXd::Constant(n_values, -std::numeric_limits<double>::infinity());
  Eigen::ArrayXd out(n_values);
  for (std::uint64_t i = begin; i < end; ++i) {
    if (fn(i, out)) {
      acc.values = acc.values.max(out);
    } else {
      ++acc.skipped;
    }
  }
  return acc;
}

}  // namespace

SampleMax max_over_samples(std::uint64_t n, int n_values,
                           const std::function<bool(std::uint64_t, Eigen::ArrayXd&)>& fn,
                           int workers) {
  if (n_values < 1) throw StructuralError("max_over_samples needs n_values >= 1");
  if (workers <= 0) {
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  workers = static_cast<int>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));

  if (workers == 1 || n == 0) return run_range(0, n, n_values, fn);

  std::vector<SampleMax> partial(workers);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::uint64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::uint64_t begin = chunk * w;
    const std::uint64_t end = std::min(n, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        partial[w] = run_range(begin, end, n_values, fn);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  SampleMax total;
  total.values = Eigen::ArrayXd::Constant(n_values, -std::numeric_limits<double>::infinity());
  for (const auto& p : partial) {
    total.values = total.values.max(p.values);
    total.skipped += p.skipped;
  }
  return total;
}

}  // namespace coopman
