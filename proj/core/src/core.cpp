#include "marginsel/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "marginsel/rng.hpp"

namespace marginsel {

namespace {

void require_same_domain(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": domain mismatch (" + std::to_string(a) + " vs " +
                                std::to_string(b) + " atoms)");
  }
}

} // namespace

DiscreteDistribution::DiscreteDistribution(std::size_t num_labels, std::vector<double> masses)
    : num_labels_(num_labels), masses_(std::move(masses)) {
  if (num_labels_ == 0) throw std::invalid_argument("DiscreteDistribution: empty label set");
  if (masses_.size() != 2 * num_labels_) {
    throw std::invalid_argument("DiscreteDistribution: expected one mass per atom");
  }
  double total = 0.0;
  for (double m : masses_) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("DiscreteDistribution: negative mass");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteDistribution: masses sum to " + std::to_string(total));
  }
  for (double& m : masses_) m /= total;

  cdf_.resize(masses_.size());
  std::partial_sum(masses_.begin(), masses_.end(), cdf_.begin());
}

DiscreteDistribution DiscreteDistribution::from_conditional(std::span<const double> x_masses,
                                                            std::span<const double> eta) {
  if (x_masses.size() != eta.size()) throw std::invalid_argument("from_conditional: size mismatch");
  std::vector<double> masses(2 * x_masses.size());
  for (std::size_t x = 0; x < x_masses.size(); ++x) {
    if (eta[x] < 0.0 || eta[x] > 1.0) throw std::invalid_argument("from_conditional: eta outside [0,1]");
    masses[atom_index(x, 0)] = x_masses[x] * (1.0 - eta[x]);
    masses[atom_index(x, 1)] = x_masses[x] * eta[x];
  }
  return DiscreteDistribution(x_masses.size(), std::move(masses));
}

double DiscreteDistribution::x_mass(std::size_t x) const {
  return masses_.at(atom_index(x, 0)) + masses_.at(atom_index(x, 1));
}

double DiscreteDistribution::eta(std::size_t x) const {
  const double px = x_mass(x);
  return px > 0.0 ? masses_[atom_index(x, 1)] / px : 0.0;
}

DiscreteDistribution DiscreteDistribution::flip_labels() const {
  std::vector<double> flipped(masses_.size());
  for (std::size_t x = 0; x < num_labels_; ++x) {
    flipped[atom_index(x, 0)] = masses_[atom_index(x, 1)];
    flipped[atom_index(x, 1)] = masses_[atom_index(x, 0)];
  }
  return DiscreteDistribution(num_labels_, std::move(flipped));
}

std::size_t DiscreteDistribution::quantile(double u) const noexcept {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t idx = it == cdf_.end() ? cdf_.size() - 1 : static_cast<std::size_t>(it - cdf_.begin());
  // Rounding in the last cdf entry can leave u past the total; fall back
  // to the last atom that carries mass.
  while (masses_[idx] == 0.0 && idx > 0) --idx;
  return idx;
}

LossFunction::LossFunction(FunctionId id, std::vector<double> values) : id_(id), values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("LossFunction: empty table");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("LossFunction: value outside [0,1]");
  }
}

LossFunction LossFunction::zero_one(FunctionId id, std::span<const std::uint8_t> predictor) {
  std::vector<double> values(2 * predictor.size());
  for (std::size_t x = 0; x < predictor.size(); ++x) {
    const int label = predictor[x] != 0 ? 1 : 0;
    values[atom_index(x, 0)] = label != 0 ? 1.0 : 0.0;
    values[atom_index(x, 1)] = label != 1 ? 1.0 : 0.0;
  }
  return LossFunction(id, std::move(values));
}

bool LossFunction::is_zero_one() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

std::vector<std::uint8_t> bayes_predictor(const DiscreteDistribution& dist) {
  std::vector<std::uint8_t> s(dist.num_labels());
  for (std::size_t x = 0; x < s.size(); ++x) {
    s[x] = dist.masses()[atom_index(x, 1)] >= dist.masses()[atom_index(x, 0)] && dist.x_mass(x) > 0.0 ? 1 : 0;
  }
  return s;
}

LossFunction bayes_loss(const DiscreteDistribution& dist, FunctionId id) {
  const auto s = bayes_predictor(dist);
  return LossFunction::zero_one(id, s);
}

Model::Model(std::string name, std::vector<LossFunction> functions)
    : name_(std::move(name)), functions_(std::move(functions)) {
  if (functions_.empty()) throw std::invalid_argument("Model '" + name_ + "' is empty");
  std::unordered_set<FunctionId> seen;
  for (const auto& f : functions_) {
    if (!seen.insert(f.id()).second) {
      throw std::invalid_argument("Model '" + name_ + "': duplicate function id " + std::to_string(f.id()));
    }
    require_same_domain(f.num_atoms(), functions_.front().num_atoms(), "Model");
  }
}

bool Model::contains(FunctionId id) const noexcept {
  return std::any_of(functions_.begin(), functions_.end(), [id](const LossFunction& f) { return f.id() == id; });
}

std::vector<FunctionId> Model::ids() const {
  std::vector<FunctionId> out;
  out.reserve(functions_.size());
  for (const auto& f : functions_) out.push_back(f.id());
  return out;
}

ModelFamily::ModelFamily(std::vector<Model> models, bool nested) : models_(std::move(models)), nested_(nested) {
  if (models_.empty()) throw std::invalid_argument("ModelFamily: no models");
  if (nested_) {
    for (std::size_t m = 0; m + 1 < models_.size(); ++m) {
      if (!is_subset(m, m + 1)) {
        throw std::invalid_argument("ModelFamily: model " + std::to_string(m) + " is not contained in model " +
                                    std::to_string(m + 1));
      }
    }
  }
}

bool ModelFamily::is_subset(std::size_t a, std::size_t b) const {
  const Model& inner = models_.at(a);
  const Model& outer = models_.at(b);
  return std::all_of(inner.functions().begin(), inner.functions().end(),
                     [&](const LossFunction& f) { return outer.contains(f.id()); });
}

Sample::Sample(std::vector<std::uint32_t> draws, std::size_t num_atoms, std::uint64_t seed)
    : draws_(std::move(draws)), counts_(num_atoms, 0), seed_(seed) {
  for (auto d : draws_) {
    if (d >= num_atoms) throw std::invalid_argument("Sample: draw outside the domain");
    ++counts_[d];
  }
}

std::vector<double> Sample::empirical_masses() const {
  std::vector<double> out(counts_.size());
  const double n = static_cast<double>(draws_.size());
  for (std::size_t a = 0; a < counts_.size(); ++a) out[a] = counts_[a] / n;
  return out;
}

double population_mean(const LossFunction& f, const DiscreteDistribution& dist) {
  require_same_domain(f.num_atoms(), dist.num_atoms(), "population_mean");
  double acc = 0.0;
  for (std::size_t a = 0; a < dist.num_atoms(); ++a) acc += dist.masses()[a] * f.values()[a];
  return acc;
}

double population_variance(const LossFunction& f, const LossFunction& g, const DiscreteDistribution& dist) {
  require_same_domain(f.num_atoms(), dist.num_atoms(), "population_variance");
  require_same_domain(g.num_atoms(), dist.num_atoms(), "population_variance");
  double mean = 0.0;
  for (std::size_t a = 0; a < dist.num_atoms(); ++a) mean += dist.masses()[a] * (f.values()[a] - g.values()[a]);
  double var = 0.0;
  for (std::size_t a = 0; a < dist.num_atoms(); ++a) {
    const double d = f.values()[a] - g.values()[a] - mean;
    var += dist.masses()[a] * d * d;
  }
  return var;
}

double population_sq_distance(const LossFunction& f, const LossFunction& g, const DiscreteDistribution& dist) {
  require_same_domain(f.num_atoms(), dist.num_atoms(), "population_sq_distance");
  require_same_domain(g.num_atoms(), dist.num_atoms(), "population_sq_distance");
  double acc = 0.0;
  for (std::size_t a = 0; a < dist.num_atoms(); ++a) {
    const double d = f.values()[a] - g.values()[a];
    acc += dist.masses()[a] * d * d;
  }
  return acc;
}

double excess_risk(const LossFunction& f, const DiscreteDistribution& dist, const LossFunction& fstar) {
  require_same_domain(f.num_atoms(), fstar.num_atoms(), "excess_risk");
  double acc = 0.0;
  for (std::size_t a = 0; a < dist.num_atoms(); ++a) acc += dist.masses()[a] * (f.values()[a] - fstar.values()[a]);
  if (acc < -kCompareTol) {
    throw std::domain_error("excess_risk: negative excess " + std::to_string(acc) + "; fstar is not a minimizer");
  }
  return std::max(acc, 0.0);
}

double empirical_mean(const LossFunction& f, const Sample& sample) {
  if (sample.size() == 0) throw std::invalid_argument("empirical_mean: empty sample");
  require_same_domain(f.num_atoms(), sample.num_atoms(), "empirical_mean");
  double acc = 0.0;
  const auto counts = sample.counts();
  for (std::size_t a = 0; a < counts.size(); ++a) acc += counts[a] * f.values()[a];
  return acc / static_cast<double>(sample.size());
}

double centered_difference(const LossFunction& f, const LossFunction& g, const Sample& sample,
                           const DiscreteDistribution& dist) {
  require_same_domain(sample.num_atoms(), dist.num_atoms(), "centered_difference");
  const double n = static_cast<double>(sample.size());
  double acc = 0.0;
  for (std::size_t a = 0; a < dist.num_atoms(); ++a) {
    const double w = sample.counts()[a] / n - dist.masses()[a];
    acc += w * (f.values()[a] - g.values()[a]);
  }
  return acc;
}

Sample draw_sample(const DiscreteDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("draw_sample: n must be >= 1");
  const CounterRng rng(seed, kSampleStream);
  std::vector<std::uint32_t> draws(n);
  for (std::size_t i = 0; i < n; ++i) draws[i] = static_cast<std::uint32_t>(dist.quantile(rng.uniform(i)));
  return Sample(std::move(draws), dist.num_atoms(), seed);
}

std::size_t population_minimizer(const Model& model, const DiscreteDistribution& dist) {
  std::size_t best = 0;
  double best_risk = population_mean(model[0], dist);
  for (std::size_t i = 1; i < model.size(); ++i) {
    const double r = population_mean(model[i], dist);
    if (r < best_risk || (r == best_risk && model[i].id() < model[best].id())) {
      best = i;
      best_risk = r;
    }
  }
  return best;
}

} // namespace marginsel
