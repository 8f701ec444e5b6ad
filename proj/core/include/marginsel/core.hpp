#pragma once

// Finite-support probability model shared by every other module.
//
// The domain is Xi = X x {0,1} with X = {0, ..., num_labels - 1}. Atom
// (x, y) is stored at index 2x + y, so a distribution, a loss table and a
// sample all index the same flat atom range.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace marginsel {

using FunctionId = std::int64_t;

/// Tolerance for inequality checks on computed quantities.
inline constexpr double kCompareTol = 1e-10;
/// Tolerance for the defining comparison of minimal sets.
inline constexpr double kMembershipTol = 1e-12;

struct Atom {
  std::size_t x = 0;
  int y = 0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

constexpr std::size_t atom_index(std::size_t x, int y) noexcept { return 2 * x + static_cast<std::size_t>(y); }
constexpr Atom atom_at(std::size_t index) noexcept { return {index / 2, static_cast<int>(index % 2)}; }

class DiscreteDistribution {
public:
  /// `masses` has one entry per atom (2 * num_labels). Throws
  /// std::invalid_argument if a mass is negative or the total is not 1
  /// within 1e-12; the stored masses are renormalized to sum to 1.
  DiscreteDistribution(std::size_t num_labels, std::vector<double> masses);

  /// Builds P from the marginal of X and the regression function
  /// eta(x) = P(Y = 1 | X = x).
  static DiscreteDistribution from_conditional(std::span<const double> x_masses, std::span<const double> eta);

  std::size_t num_labels() const noexcept { return num_labels_; }
  std::size_t num_atoms() const noexcept { return masses_.size(); }
  double mass(std::size_t atom) const { return masses_.at(atom); }
  std::span<const double> masses() const noexcept { return masses_; }

  double x_mass(std::size_t x) const;
  /// P(Y = 1 | X = x); 0 when x has no mass.
  double eta(std::size_t x) const;

  /// Law of (X, 1 - Y).
  DiscreteDistribution flip_labels() const;

  /// Inverse-CDF lookup over the declared atom order. Atoms with zero mass
  /// are never returned.
  std::size_t quantile(double u) const noexcept;

  friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

private:
  std::size_t num_labels_;
  std::vector<double> masses_;
  std::vector<double> cdf_;
};

/// A function Xi -> [0,1] tabulated on every atom.
class LossFunction {
public:
  LossFunction(FunctionId id, std::vector<double> values);

  /// 0-1 loss of predictor u: value 1{u(x) != y}.
  static LossFunction zero_one(FunctionId id, std::span<const std::uint8_t> predictor);

  FunctionId id() const noexcept { return id_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator()(std::size_t atom) const { return values_.at(atom); }
  std::size_t num_atoms() const noexcept { return values_.size(); }
  bool is_zero_one() const noexcept;

  friend bool operator==(const LossFunction&, const LossFunction&) = default;

private:
  FunctionId id_;
  std::vector<double> values_;
};

/// Bayes predictor s(x) = 1{eta(x) >= 1/2}.
std::vector<std::uint8_t> bayes_predictor(const DiscreteDistribution& dist);
/// 0-1 loss of the Bayes predictor; minimizes P(f) over all 0-1 losses.
LossFunction bayes_loss(const DiscreteDistribution& dist, FunctionId id = -1);

/// A finite ordered set of loss functions with unique ids. Order is
/// construction order and is part of the model's identity.
class Model {
public:
  Model(std::string name, std::vector<LossFunction> functions);

  const std::string& name() const noexcept { return name_; }
  std::span<const LossFunction> functions() const noexcept { return functions_; }
  const LossFunction& operator[](std::size_t i) const { return functions_.at(i); }
  std::size_t size() const noexcept { return functions_.size(); }
  std::size_t num_atoms() const noexcept { return functions_.front().num_atoms(); }
  bool contains(FunctionId id) const noexcept;
  std::vector<FunctionId> ids() const;

private:
  std::string name_;
  std::vector<LossFunction> functions_;
};

class ModelFamily {
public:
  /// When `nested` is true, inclusion of consecutive models is verified
  /// by id-set containment and std::invalid_argument is thrown if it fails.
  ModelFamily(std::vector<Model> models, bool nested);

  std::span<const Model> models() const noexcept { return models_; }
  const Model& operator[](std::size_t m) const { return models_.at(m); }
  std::size_t size() const noexcept { return models_.size(); }
  bool nested() const noexcept { return nested_; }

  /// True iff every id of model a is also in model b.
  bool is_subset(std::size_t a, std::size_t b) const;

private:
  std::vector<Model> models_;
  bool nested_;
};

class Sample {
public:
  Sample(std::vector<std::uint32_t> draws, std::size_t num_atoms, std::uint64_t seed = 0);

  std::span<const std::uint32_t> draws() const noexcept { return draws_; }
  std::size_t size() const noexcept { return draws_.size(); }
  std::size_t num_atoms() const noexcept { return counts_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  /// Multiplicity of each atom.
  std::span<const std::uint32_t> counts() const noexcept { return counts_; }
  /// Empirical measure P_n as atom masses.
  std::vector<double> empirical_masses() const;

private:
  std::vector<std::uint32_t> draws_;
  std::vector<std::uint32_t> counts_;
  std::uint64_t seed_;
};

double population_mean(const LossFunction& f, const DiscreteDistribution& dist);
/// Variance of (f - g)(xi) under P.
double population_variance(const LossFunction& f, const LossFunction& g, const DiscreteDistribution& dist);
/// P((f - g)^2).
double population_sq_distance(const LossFunction& f, const LossFunction& g, const DiscreteDistribution& dist);
/// P(f) - P(fstar). Throws std::domain_error if the result is below
/// -kCompareTol, which means fstar is not a minimizer.
double excess_risk(const LossFunction& f, const DiscreteDistribution& dist, const LossFunction& fstar);

double empirical_mean(const LossFunction& f, const Sample& sample);
/// (P_n - P)(f - g).
double centered_difference(const LossFunction& f, const LossFunction& g, const Sample& sample,
                           const DiscreteDistribution& dist);

/// n i.i.d. draws by inverse CDF with a counter-based generator; the same
/// (dist, n, seed) gives identical draws everywhere.
Sample draw_sample(const DiscreteDistribution& dist, std::size_t n, std::uint64_t seed);

/// Population minimizer within a model; ties go to the smallest id.
std::size_t population_minimizer(const Model& model, const DiscreteDistribution& dist);

} // namespace marginsel
