#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace toolsel {

// Portable random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; every derived variate is computed here
// rather than through <random> distributions, whose algorithms are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  // Independent stream for a (seed, purpose) pair.
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0,1), never 0 or 1: (k + 0.5) / 2^53.
  double uniform01();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  // Standard normal via inverse CDF, one engine draw per variate.
  double normal();

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Inverse of the standard normal CDF (Acklam's rational approximation,
// relative error below 1.2e-9). p must lie in (0,1).
double inverse_normal_cdf(double p);

// Named stream tags so that independent consumers never share a sequence.
namespace streams {
inline constexpr std::uint64_t init = 1;
inline constexpr std::uint64_t shuffle = 2;
inline constexpr std::uint64_t validation = 3;
inline constexpr std::uint64_t catalog = 10;
inline constexpr std::uint64_t visual_mixing = 11;
inline constexpr std::uint64_t language_mixing = 12;
inline constexpr std::uint64_t visual_noise = 13;
inline constexpr std::uint64_t language_noise = 14;
inline constexpr std::uint64_t trials = 15;
}  // namespace streams

}  // namespace toolsel
