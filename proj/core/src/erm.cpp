#include "marginsel/erm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "marginsel/rng.hpp"

namespace marginsel {

namespace {

std::vector<double> risks_under(const Model& model, std::span<const double> masses) {
  std::vector<double> risks(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto v = model[i].values();
    double acc = 0.0;
    for (std::size_t a = 0; a < masses.size(); ++a) acc += masses[a] * v[a];
    risks[i] = acc;
  }
  return risks;
}

// Empirical risks from integer counts, so ties between 0-1 losses are exact.
std::vector<double> empirical_risks(const Model& model, const Sample& sample) {
  if (sample.size() == 0) throw std::invalid_argument("empirical risk of an empty sample");
  if (model.num_atoms() != sample.num_atoms()) throw std::invalid_argument("model/sample domain mismatch");
  std::vector<double> risks(model.size());
  const auto counts = sample.counts();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto v = model[i].values();
    double acc = 0.0;
    for (std::size_t a = 0; a < counts.size(); ++a) acc += counts[a] * v[a];
    risks[i] = acc / static_cast<double>(sample.size());
  }
  return risks;
}

MinimalSet minimal_set_from_risks(const Model& model, const std::vector<double>& risks, double delta, Basis basis) {
  if (delta < 0.0) throw std::invalid_argument("minimal_set: delta must be >= 0");
  const double lowest = *std::min_element(risks.begin(), risks.end());
  MinimalSet set;
  set.level = delta;
  set.basis = basis;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (risks[i] <= lowest + delta + kMembershipTol) {
      set.members.push_back(i);
      set.member_ids.push_back(model[i].id());
    }
  }
  return set;
}

double weighted_sq_sup(const Model& model, const std::vector<std::size_t>& members, std::span<const double> w) {
  double best = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto fi = model[members[i]].values();
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const auto fj = model[members[j]].values();
      double acc = 0.0;
      for (std::size_t a = 0; a < w.size(); ++a) {
        const double d = fi[a] - fj[a];
        acc += w[a] * d * d;
      }
      best = std::max(best, acc);
    }
  }
  return best;
}

std::vector<std::size_t> risk_order(const Model& model, const std::vector<double>& risks) {
  std::vector<std::size_t> order(model.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (risks[a] != risks[b]) return risks[a] < risks[b];
    return model[a].id() < model[b].id();
  });
  return order;
}

// Prefix suprema of pairwise sq. distances weighted by w, in `order`.
std::vector<double> prefix_sq_sup(const Model& model, const std::vector<std::size_t>& order,
                                  std::span<const double> w) {
  std::vector<double> out(order.size(), 0.0);
  double running = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto fk = model[order[k]].values();
    for (std::size_t j = 0; j < k; ++j) {
      const auto fj = model[order[j]].values();
      double acc = 0.0;
      for (std::size_t a = 0; a < w.size(); ++a) {
        const double d = fk[a] - fj[a];
        acc += w[a] * d * d;
      }
      running = std::max(running, acc);
    }
    out[k] = running;
  }
  return out;
}

std::size_t prefix_size_for(const std::vector<double>& sorted_risks, double delta) {
  if (delta < 0.0) throw std::invalid_argument("prefix_size: delta must be >= 0");
  const double cut = sorted_risks.front() + delta + kMembershipTol;
  return static_cast<std::size_t>(std::upper_bound(sorted_risks.begin(), sorted_risks.end(), cut) -
                                  sorted_risks.begin());
}

} // namespace

std::size_t erm_index(const Model& model, const Sample& sample) {
  const auto risks = empirical_risks(model, sample);
  std::size_t best = 0;
  for (std::size_t i = 1; i < model.size(); ++i) {
    if (risks[i] < risks[best] || (risks[i] == risks[best] && model[i].id() < model[best].id())) best = i;
  }
  return best;
}

const LossFunction& erm(const Model& model, const Sample& sample) { return model[erm_index(model, sample)]; }

MinimalSet minimal_set(const Model& model, const DiscreteDistribution& dist, double delta) {
  if (model.num_atoms() != dist.num_atoms()) throw std::invalid_argument("minimal_set: domain mismatch");
  return minimal_set_from_risks(model, risks_under(model, dist.masses()), delta, Basis::population);
}

MinimalSet minimal_set(const Model& model, const Sample& sample, double delta) {
  return minimal_set_from_risks(model, empirical_risks(model, sample), delta, Basis::empirical);
}

double diameter(const Model& model, const DiscreteDistribution& dist, double delta) {
  const auto set = minimal_set(model, dist, delta);
  return std::sqrt(weighted_sq_sup(model, set.members, dist.masses()));
}

double diameter(const Model& model, const Sample& sample, double delta) {
  const auto set = minimal_set(model, sample, delta);
  const auto w = sample.empirical_masses();
  return weighted_sq_sup(model, set.members, w);
}

ModulusEstimate expected_modulus(const Model& model, const DiscreteDistribution& dist, std::size_t n, double delta,
                                 std::size_t reps, std::uint64_t seed) {
  if (reps == 0) throw std::invalid_argument("expected_modulus: reps must be >= 1");
  const auto set = minimal_set(model, dist, delta);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const Sample sample = draw_sample(dist, n, derive_seed(seed, r));
    double sup = 0.0;
    for (std::size_t i = 0; i < set.members.size(); ++i) {
      for (std::size_t j = i + 1; j < set.members.size(); ++j) {
        sup = std::max(sup, std::abs(centered_difference(model[set.members[i]], model[set.members[j]], sample, dist)));
      }
    }
    sum += sup;
    sum_sq += sup * sup;
  }
  ModulusEstimate est;
  est.reps = reps;
  est.mean = sum / static_cast<double>(reps);
  if (reps > 1) {
    const double var = std::max(0.0, (sum_sq - sum * est.mean) / static_cast<double>(reps - 1));
    est.std_error = std::sqrt(var / static_cast<double>(reps));
  }
  return est;
}

std::vector<int> rademacher_draw(std::size_t n, std::uint64_t seed) {
  const CounterRng rng(seed, kRademacherStream);
  std::vector<int> eps(n);
  for (std::size_t i = 0; i < n; ++i) eps[i] = rng.rademacher(i);
  return eps;
}

double rademacher_modulus(const Model& model, const Sample& sample, double delta, std::span<const int> eps) {
  if (eps.size() != sample.size()) throw std::invalid_argument("rademacher_modulus: eps length must equal n");
  const auto set = minimal_set(model, sample, delta);
  const auto draws = sample.draws();
  const double n = static_cast<double>(sample.size());
  double best = 0.0;
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    for (std::size_t j = i + 1; j < set.members.size(); ++j) {
      const auto& f = model[set.members[i]];
      const auto& g = model[set.members[j]];
      double acc = 0.0;
      for (std::size_t k = 0; k < draws.size(); ++k) acc += eps[k] * (f(draws[k]) - g(draws[k]));
      best = std::max(best, std::abs(acc / n));
    }
  }
  return best;
}

double rademacher_modulus(const Model& model, const Sample& sample, double delta, std::uint64_t eps_seed) {
  const auto eps = rademacher_draw(sample.size(), eps_seed);
  return rademacher_modulus(model, sample, delta, eps);
}

PopulationGeometry::PopulationGeometry(const Model& model, const DiscreteDistribution& dist) {
  if (model.num_atoms() != dist.num_atoms()) throw std::invalid_argument("PopulationGeometry: domain mismatch");
  const auto risks = risks_under(model, dist.masses());
  order_ = risk_order(model, risks);
  risks_.reserve(order_.size());
  for (auto i : order_) risks_.push_back(risks[i]);
  diam_sq_ = prefix_sq_sup(model, order_, dist.masses());
}

std::size_t PopulationGeometry::prefix_size(double delta) const { return prefix_size_for(risks_, delta); }

std::vector<std::size_t> PopulationGeometry::distinct_prefixes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k <= risks_.size(); ++k) {
    if (k == risks_.size() || risks_[k] > risks_[k - 1]) {
      out.push_back(k);
    }
  }
  return out;
}

std::vector<ModulusEstimate> expected_modulus_by_prefix(const Model& model, const DiscreteDistribution& dist,
                                                        const PopulationGeometry& geometry, std::size_t n,
                                                        std::size_t reps, std::uint64_t seed) {
  if (reps == 0) throw std::invalid_argument("expected_modulus_by_prefix: reps must be >= 1");
  const std::size_t m = model.size();
  const auto order = geometry.order();
  std::vector<double> sum(m, 0.0), sum_sq(m, 0.0), centered(m);
  for (std::size_t r = 0; r < reps; ++r) {
    const Sample sample = draw_sample(dist, n, derive_seed(seed, r));
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k < m; ++k) {
      const auto v = model[order[k]].values();
      double acc = 0.0;
      for (std::size_t a = 0; a < dist.num_atoms(); ++a) acc += (sample.counts()[a] / nd - dist.masses()[a]) * v[a];
      centered[k] = acc;
    }
    // sup_{f,g} |c_f - c_g| over a prefix is max - min over it.
    double lo = centered[0], hi = centered[0];
    for (std::size_t k = 0; k < m; ++k) {
      lo = std::min(lo, centered[k]);
      hi = std::max(hi, centered[k]);
      const double sup = hi - lo;
      sum[k] += sup;
      sum_sq[k] += sup * sup;
    }
  }
  std::vector<ModulusEstimate> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    out[k].reps = reps;
    out[k].mean = sum[k] / static_cast<double>(reps);
    if (reps > 1) {
      const double var = std::max(0.0, (sum_sq[k] - sum[k] * out[k].mean) / static_cast<double>(reps - 1));
      out[k].std_error = std::sqrt(var / static_cast<double>(reps));
    }
  }
  return out;
}

EmpiricalGeometry::EmpiricalGeometry(const Model& model, const Sample& sample, std::span<const int> eps)
    : n_(sample.size()) {
  if (eps.size() != sample.size()) throw std::invalid_argument("EmpiricalGeometry: eps length must equal n");
  const auto risks = empirical_risks(model, sample);
  order_ = risk_order(model, risks);
  risks_.reserve(order_.size());
  for (auto i : order_) risks_.push_back(risks[i]);
  const auto w = sample.empirical_masses();
  diam_ = prefix_sq_sup(model, order_, w);

  // Rademacher-weighted atom totals: sum over draws of eps_i at each atom.
  std::vector<double> eps_mass(sample.num_atoms(), 0.0);
  const auto draws = sample.draws();
  for (std::size_t i = 0; i < draws.size(); ++i) eps_mass[draws[i]] += eps[i];

  rad_.resize(order_.size());
  double lo = 0.0, hi = 0.0;
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const auto v = model[order_[k]].values();
    double acc = 0.0;
    for (std::size_t a = 0; a < eps_mass.size(); ++a) acc += eps_mass[a] * v[a];
    acc /= static_cast<double>(n_);
    if (k == 0) lo = hi = acc;
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
    rad_[k] = hi - lo;
  }
}

std::size_t EmpiricalGeometry::prefix_size(double delta) const { return prefix_size_for(risks_, delta); }

} // namespace marginsel
