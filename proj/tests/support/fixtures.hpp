#pragma once

// Shared builders for the test binaries.

#include <cstdint>
#include <vector>

#include "marginsel/core.hpp"
#include "marginsel/rng.hpp"

namespace marginsel::testing {

/// Sample from explicit atom indices.
inline Sample sample_of(std::vector<std::uint32_t> atoms, std::size_t num_atoms) {
  return Sample(std::move(atoms), num_atoms);
}

/// Random 0-1 predictor on `num_labels` labels.
inline std::vector<std::uint8_t> random_predictor(std::size_t num_labels, std::uint64_t seed) {
  const CounterRng rng(seed, kProbeStream);
  std::vector<std::uint8_t> u(num_labels);
  for (std::size_t x = 0; x < num_labels; ++x) u[x] = rng.uniform(x) < 0.5 ? 0 : 1;
  return u;
}

/// Random nested pair (small, big) of 0-1 models on a random distribution:
/// big holds `big_size` distinct predictors, small is its first `small_size`.
struct NestedPair {
  DiscreteDistribution dist;
  LossFunction fstar;
  Model small;
  Model big;
};

NestedPair random_nested_pair(std::uint64_t seed, std::size_t num_labels, std::size_t small_size,
                              std::size_t big_size);

} // namespace marginsel::testing
