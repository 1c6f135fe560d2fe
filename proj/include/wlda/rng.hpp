#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace wlda {

/// Seeded random source. The engine is std::mt19937_64 (fully specified by
/// the standard); every distribution on top of it is implemented here so
/// that a seed produces the same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); never returns 0.
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  /// Uniform integer in [0, n) by rejection (unbiased). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n);

  double normal();
  double gamma(double shape);
  std::uint64_t poisson(double mean);

  /// Index drawn proportionally to non-negative weights (cumulative-sum
  /// inversion on one uniform). Weights must have a positive sum.
  std::size_t categorical(std::span<const double> weights);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace wlda
