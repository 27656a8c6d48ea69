#ifndef COOPMAN_RNG_HPP
#define COOPMAN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Core>

#include "coopman/weighted_norm.hpp"

namespace coopman {

/// Splittable counter-based generator (splitmix64 core). Substreams are
/// derived from the construction seed, never from the evolving state, so
/// substream(i) is the same generator no matter how many draws the parent
/// has made and no matter which worker asks for it. Monte Carlo code gives
/// sample i its own substream; growing the sample count then never changes
/// the first samples.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  /// Independent child generator identified by (parent seed, label).
  Rng substream(std::uint64_t label) const {
    return Rng(mix(mix(seed_) + 0x9E3779B97F4A7C15ull * (label + 1)));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal (Box-Muller; one trig pair per draw keeps the stream
  /// position independent of past draws' values).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd normal_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_;
};

/// Uniform draw from the closed ball { e : ||e||_norm <= radius }. For the
/// weighted infinity norm the ball is a box, sampled componentwise; for the
/// weighted 2-norm it is an ellipsoid, sampled as a radius-corrected
/// direction and mapped back through the weights.
inline Eigen::VectorXd sample_in_ball(Rng& rng, const WeightedNorm& norm, double radius) {
  const Eigen::VectorXd& w = norm.component_weights();
  const int m = norm.dim();
  Eigen::VectorXd e(m);
  if (norm.kind() == NormKind::inf) {
    for (int j = 0; j < m; ++j) e(j) = rng.uniform(-1.0, 1.0) * radius / w(j);
    return e;
  }
  Eigen::VectorXd g = rng.normal_vector(m);
  while (g.norm() < 1e-300) g = rng.normal_vector(m);
  const double r = radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(m));
  const Eigen::VectorXd x = (r / g.norm()) * g;
  for (int j = 0; j < m; ++j) e(j) = x(j) / w(j);
  return e;
}

}  // namespace coopman

#endif
