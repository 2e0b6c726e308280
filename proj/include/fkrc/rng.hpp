#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fkrc {

/// Random stream for one chain. Streams are derived from a 64-bit master seed
/// and a stream index through std::seed_seq, so every (seed, stream) pair is
/// reproducible and distinct streams are statistically independent.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
    engine_.seed(seq);
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits; platform independent.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal by Box-Muller (one draw per call, no cached pair).
  double normal() {
    const double u = 1.0 - uniform(), v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // reject the incomplete top block so every residue is equally likely
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Child stream; used to hand each chain its own generator.
  Rng split(std::uint64_t stream) { return Rng(engine_(), stream); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fkrc
