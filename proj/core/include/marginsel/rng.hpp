#pragma once

#include <cstdint>

namespace marginsel {

/// Stateless counter-based generator: the value at (seed, stream, counter)
/// is a fixed function of its three inputs, so draws are reproducible
/// bit-for-bit on every platform and can be taken in any order.
class CounterRng {
public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const noexcept;

  /// +1 or -1 with probability 1/2 each.
  int rademacher(std::uint64_t counter) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of replicate `index` derived from a base seed by counter offset.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

// Stream tags keep independent uses of one seed from colliding.
inline constexpr std::uint64_t kSampleStream = 0x53414d50ULL;
inline constexpr std::uint64_t kRademacherStream = 0x52414445ULL;
inline constexpr std::uint64_t kRuleStream = 0x52554c45ULL;
inline constexpr std::uint64_t kProbeStream = 0x50524f42ULL;

} // namespace marginsel
