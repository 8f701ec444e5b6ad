#pragma once

// Exact binomial pmf and the scan of sqrt(n) * pmf over a central window.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace marginsel {

/// P(Z = k) for Z ~ Binomial(n, p), by the saddle-point (Loader) form:
/// relative error near machine precision for every n that fits in 64 bits.
/// Throws std::domain_error unless k <= n and p in [0, 1].
double binom_pmf(std::uint64_t n, double p, std::uint64_t k);

struct FloorPoint {
  std::uint64_t k = 0;
  double p = 0.0;
  double value = 0.0; // sqrt(n) * pmf
};

struct FloorReport {
  std::uint64_t n = 0;
  std::vector<FloorPoint> grid;
  double min_value = 0.0;
  FloorPoint argmin;
};

/// Infimum of sqrt(n) P(Z = k) over integers k with |k - n/2| <= min(a sqrt(n), n/2)
/// and p with |p - 1/2| <= min(b / sqrt(n), c).
///
/// With `exact`, each k is evaluated at the two p endpoints and at k/n when
/// inside; the pmf is unimodal in p with mode k/n, so the minimum over the
/// interval is at an endpoint and this set is exact. Otherwise a dense grid
/// of 201 points plus the endpoints is scanned.
/// Throws std::invalid_argument unless a, b > 0, c in (0, 1/2) and n >= 1.
FloorReport pmf_floor(std::uint64_t n, double a, double b, double c, bool exact = true);

} // namespace marginsel
