#include "marginsel/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "marginsel/rng.hpp"

namespace marginsel {

CounterexampleInstance build_counterexample(std::size_t n) {
  if (n < 2) throw std::invalid_argument("build_counterexample: n must be >= 2");
  const double nd = static_cast<double>(n);
  const double alpha = 1.0 / (2.0 * nd);
  const double h = 1.0 / std::sqrt(2.0 * nd);

  const std::vector<double> x_masses{alpha, 1.0 - alpha};
  const std::vector<double> eta{0.0, 0.5 + h};
  auto p1 = DiscreteDistribution::from_conditional(x_masses, eta);
  auto p0 = p1.flip_labels();

  const std::vector<std::uint8_t> zeros{0, 0};
  const std::vector<std::uint8_t> ones{1, 1};
  auto fstar1 = bayes_loss(p1, -1);
  auto fstar0 = bayes_loss(p0, -1);

  return CounterexampleInstance{std::move(p0),
                                std::move(p1),
                                LossFunction::zero_one(0, zeros),
                                LossFunction::zero_one(1, ones),
                                std::move(fstar0),
                                std::move(fstar1),
                                n,
                                alpha,
                                h};
}

double oracle_benchmark_branch(const DiscreteDistribution& dist, const LossFunction& f, const LossFunction& fstar,
                               std::size_t n) {
  const double nd = static_cast<double>(n);
  const double log_n = std::log(nd);
  const double excess = excess_risk(f, dist, fstar);
  const double var = population_variance(f, fstar, dist);
  const double vbar = std::sqrt(2.0 * log_n * var / nd);
  // h_m = excess / var; ln(n)/(n h_m) = ln(n) var / (n excess), and 0 when
  // the variance vanishes (h_m = +inf).
  double margin_term = 0.0;
  if (var > 0.0) {
    margin_term = excess > 0.0 ? log_n * var / (nd * excess) : std::numeric_limits<double>::infinity();
  }
  return excess + vbar + margin_term;
}

double oracle_benchmark(const CounterexampleInstance& inst, int j) {
  const auto& dist = inst.dist(j);
  const auto& fstar = inst.fstar(j);
  return std::min(oracle_benchmark_branch(dist, inst.f0, fstar, inst.n),
                  oracle_benchmark_branch(dist, inst.f1, fstar, inst.n));
}

MarginGapInstance build_margin_gap(double kappa, std::size_t depth, std::size_t num_functions) {
  if (!(kappa > 1.0) || !std::isfinite(kappa)) throw std::invalid_argument("build_margin_gap: kappa must be > 1");
  if (depth < 2) throw std::invalid_argument("build_margin_gap: depth must be >= 2");
  if (num_functions > 2 * depth) throw std::invalid_argument("build_margin_gap: at most 2*depth functions");

  const double lambda = kappa - 1.0;
  const std::size_t blocks = depth + 1;
  const std::size_t labels = 2 * blocks + 1;

  std::vector<double> p(blocks), q(blocks), delta(blocks);
  std::vector<double> x_masses(labels, 0.0), eta(labels, 0.0);
  for (std::size_t k = 0; k < blocks; ++k) {
    p[k] = std::ldexp(1.0, -static_cast<int>(k) - 1);
    delta[k] = std::pow(2.0, -static_cast<double>(k) * lambda);
    q[k] = delta[k] / (1.0 + delta[k]);
    x_masses[2 * k] = p[k] * q[k];
    x_masses[2 * k + 1] = p[k] * (1.0 - q[k]);
    eta[2 * k] = 0.0;
    eta[2 * k + 1] = (1.0 + delta[k]) / 2.0;
  }
  x_masses[labels - 1] = std::ldexp(1.0, -static_cast<int>(blocks));
  eta[labels - 1] = 0.0;

  auto dist = DiscreteDistribution::from_conditional(x_masses, eta);
  auto s = bayes_predictor(dist);
  auto fstar = LossFunction::zero_one(-1, s);

  std::vector<LossFunction> fs;
  fs.reserve(num_functions);
  for (std::size_t j = 0; j < num_functions; ++j) {
    auto u = s;
    u[j] = 1 - u[j];
    fs.push_back(LossFunction::zero_one(static_cast<FunctionId>(j), u));
  }

  return MarginGapInstance{std::move(dist), std::move(fs), std::move(fstar), kappa, lambda, depth,
                           std::move(p),    std::move(q),  std::move(delta)};
}

DiscreteDistribution random_distribution(std::size_t num_labels, std::uint64_t seed) {
  const CounterRng rng(seed, kProbeStream);
  std::vector<double> x_masses(num_labels), eta(num_labels);
  double total = 0.0;
  for (std::size_t x = 0; x < num_labels; ++x) {
    x_masses[x] = 0.05 + rng.uniform(2 * x);
    total += x_masses[x];
    eta[x] = rng.uniform(2 * x + 1);
  }
  for (double& m : x_masses) m /= total;
  return DiscreteDistribution::from_conditional(x_masses, eta);
}

DiscreteDistribution fair_coin_distribution() {
  const std::vector<double> x_masses{0.5, 0.5};
  const std::vector<double> eta{0.0, 1.0};
  return DiscreteDistribution::from_conditional(x_masses, eta);
}

GeneralInstance build_general_instance() {
  const std::vector<double> x_masses{0.15, 0.25, 0.35, 0.25};
  const std::vector<double> eta{0.2, 0.45, 0.7, 0.9};
  auto dist = DiscreteDistribution::from_conditional(x_masses, eta);
  auto fstar = bayes_loss(dist);
  // Bayes predictor is (0, 0, 1, 1). Model 0 is close to it with a
  // low-variance flip, model 1 mixes threshold-like predictors, model 2
  // holds two distant predictors.
  std::vector<std::vector<std::uint8_t>> predictors{
      {0, 0, 1, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}, {0, 0, 0, 1}, {1, 1, 1, 1}, {0, 0, 1, 0}, {1, 1, 0, 0},
  };
  return GeneralInstance{std::move(dist), std::move(fstar), std::move(predictors)};
}

} // namespace marginsel
