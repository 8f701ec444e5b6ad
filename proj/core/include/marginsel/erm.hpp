#pragma once

// Empirical risk minimization and the geometry of delta-minimal sets.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "marginsel/core.hpp"

namespace marginsel {

/// Index of the empirical minimizer in `model`; ties go to the smallest id.
std::size_t erm_index(const Model& model, const Sample& sample);
const LossFunction& erm(const Model& model, const Sample& sample);

enum class Basis { population, empirical };

struct MinimalSet {
  std::vector<std::size_t> members; // indices into the model, in model order
  std::vector<FunctionId> member_ids;
  double level = 0.0;
  Basis basis = Basis::population;
};

/// {f in F_m : P(f) - min_g P(g) <= delta}, compared with kMembershipTol.
MinimalSet minimal_set(const Model& model, const DiscreteDistribution& dist, double delta);
/// Same with P replaced by the empirical measure of `sample`.
MinimalSet minimal_set(const Model& model, const Sample& sample, double delta);

/// D_P(F_m; delta) = sqrt(sup_{f,g in F_{m,P}(delta)} P((f-g)^2)).
double diameter(const Model& model, const DiscreteDistribution& dist, double delta);
/// Empirical diameter sup_{f,g} P_n((f-g)^2) over the empirical minimal
/// set, as displayed (no square root).
double diameter(const Model& model, const Sample& sample, double delta);

struct ModulusEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
};

/// Monte Carlo estimate of E sup_{f,g in F_{m,P}(delta)} |(P_n - P)(f - g)|
/// over `reps` fresh samples of size n. Replicate r uses
/// derive_seed(seed, r).
ModulusEstimate expected_modulus(const Model& model, const DiscreteDistribution& dist, std::size_t n, double delta,
                                 std::size_t reps, std::uint64_t seed);

/// i.i.d. Rademacher signs from a seed.
std::vector<int> rademacher_draw(std::size_t n, std::uint64_t seed);

/// sup over the empirical delta-minimal set of |n^-1 sum eps_i (f - g)(xi_i)|.
/// Throws std::invalid_argument if eps.size() != sample.size().
double rademacher_modulus(const Model& model, const Sample& sample, double delta, std::span<const int> eps);
double rademacher_modulus(const Model& model, const Sample& sample, double delta, std::uint64_t eps_seed);

/// Minimal-set geometry of one model under P. Functions are ordered by
/// risk (ties by id) so every minimal set is a prefix of that order; the
/// pairwise suprema are tabulated per prefix once.
class PopulationGeometry {
public:
  PopulationGeometry(const Model& model, const DiscreteDistribution& dist);

  std::size_t prefix_size(double delta) const;
  /// sup P((f-g)^2) over the first k functions in risk order.
  double diameter_sq(std::size_t k) const { return diam_sq_.at(k - 1); }
  std::span<const std::size_t> order() const noexcept { return order_; }
  std::span<const double> sorted_risks() const noexcept { return risks_; }
  /// Prefix sizes at which the minimal set changes (end of each tie group).
  std::vector<std::size_t> distinct_prefixes() const;

private:
  std::vector<std::size_t> order_;
  std::vector<double> risks_;
  std::vector<double> diam_sq_;
};

/// Monte Carlo expected modulus for every prefix size 1..|model| in one
/// pass over the replicate samples.
std::vector<ModulusEstimate> expected_modulus_by_prefix(const Model& model, const DiscreteDistribution& dist,
                                                        const PopulationGeometry& geometry, std::size_t n,
                                                        std::size_t reps, std::uint64_t seed);

/// Empirical counterpart for one sample and one Rademacher draw.
class EmpiricalGeometry {
public:
  EmpiricalGeometry(const Model& model, const Sample& sample, std::span<const int> eps);

  std::size_t prefix_size(double delta) const;
  /// sup P_n((f-g)^2) over the first k functions in empirical risk order.
  double diameter(std::size_t k) const { return diam_.at(k - 1); }
  /// sup |n^-1 sum eps_i (f - g)(xi_i)| over the same prefix.
  double rademacher(std::size_t k) const { return rad_.at(k - 1); }
  std::span<const std::size_t> order() const noexcept { return order_; }
  std::span<const double> sorted_risks() const noexcept { return risks_; }
  std::size_t sample_size() const noexcept { return n_; }

private:
  std::size_t n_;
  std::vector<std::size_t> order_;
  std::vector<double> risks_;
  std::vector<double> diam_;
  std::vector<double> rad_;
};

} // namespace marginsel
