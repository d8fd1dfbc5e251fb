#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace inhomstat {

/// Seed plus stream index. Distinct streams under one seed are independent.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// SplitMix64 finaliser, used to derive child seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// FNV-1a over a string; stable across platforms.
std::uint64_t hash_string(const char* data, std::size_t size) noexcept;

/// Philox4x32-10 counter-based generator (Salmon et al. 2011).
///
/// Key = 64-bit seed, counter = (64-bit block counter, 64-bit stream). All
/// integer work is platform independent; the floating-point helpers only use
/// IEEE arithmetic plus log/cos/sin/lgamma from libm.
class Rng {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Rng(RngSeed seed) noexcept;

  /// Raw Philox4x32-10 bijection, exposed for known-answer tests.
  static Block philox(Block counter, std::array<std::uint32_t, 2> key) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;
  /// Poisson variate: multiplication method below mean 12, PTRS above.
  std::uint64_t poisson(double mean) noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Block buffer_{};
  int available_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace inhomstat
