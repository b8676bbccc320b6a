#pragma once

#include <cstdint>
#include <random>

namespace nmsub {

/// Seeded 64-bit Mersenne Twister with a platform-independent mapping to
/// doubles. std::uniform_real_distribution is implementation-defined, so it
/// is not used anywhere that must reproduce across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi]. Returns lo when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Campaign seed splitting. Each (problem, start) cell gets an independent
/// stream: seed ^ (problem * kProblemStride) ^ (start * kStartStride).
inline constexpr std::uint64_t kProblemStride = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kStartStride = 0xD1B54A32D192ED03ULL;
/// Extra tag so problem-generation streams never coincide with start streams.
inline constexpr std::uint64_t kProblemTag = 0xA24BAED4963EE407ULL;

inline std::uint64_t run_seed(std::uint64_t base, std::uint64_t problem,
                              std::uint64_t start) {
  return base ^ (problem * kProblemStride) ^ (start * kStartStride);
}

inline std::uint64_t problem_seed(std::uint64_t base, std::uint64_t problem) {
  return base ^ (problem * kProblemStride) ^ kProblemTag;
}

}  // namespace nmsub
