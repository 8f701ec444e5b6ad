#pragma once

// Explicit problem instances: the two-point counterexample pair, the
// margin-gap sequence, and small generic instances.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "marginsel/core.hpp"

namespace marginsel {

/// Domain X = {a, b} (labels 0 and 1). Under p1, P(X=a) = alpha,
/// P(X=b) = 1 - alpha, eta(a) = 0 and eta(b) = 1/2 + h; p0 is the
/// law of (X, 1 - Y). f0 and f1 are the 0-1 losses of the constant
/// predictors u_m = m, i.e. f_m(x, y) = 1{y != m}.
struct CounterexampleInstance {
  static constexpr std::size_t kLabelA = 0;
  static constexpr std::size_t kLabelB = 1;

  DiscreteDistribution p0;
  DiscreteDistribution p1;
  LossFunction f0;
  LossFunction f1;
  LossFunction fstar0;
  LossFunction fstar1;
  std::size_t n;
  double alpha;
  double h;

  const DiscreteDistribution& dist(int j) const { return j == 0 ? p0 : p1; }
  const LossFunction& f(int m) const { return m == 0 ? f0 : f1; }
  const LossFunction& fstar(int j) const { return j == 0 ? fstar0 : fstar1; }
};

/// alpha = 1/(2n), h = (2n)^(-1/2). Throws std::invalid_argument if n < 2.
CounterexampleInstance build_counterexample(std::size_t n);

/// min over m of { P(f_m - f*) + vbar(m) + ln(n) / (n h_m) } under the
/// distribution `j` of the pair (p1 by default), where
/// vbar(m) = sqrt(2 ln(n) Var(f_m - f*) / n) and
/// h_m = P(f_m - f*) / Var(f_m - f*). A zero variance makes h_m = +inf and
/// the last term 0.
double oracle_benchmark(const CounterexampleInstance& inst, int j = 1);

/// Value of a single branch of the benchmark minimum.
double oracle_benchmark_branch(const DiscreteDistribution& dist, const LossFunction& f, const LossFunction& fstar,
                               std::size_t n);

/// Margin-gap sequence truncated at depth K.
///
/// Labels x_0 .. x_{2K+1} carry blocks k = 0..K with
/// P(X = x_2k) = p_k q_k, P(X = x_2k+1) = p_k (1 - q_k),
/// p_k = 2^(-k-1), delta_k = 2^(-k lambda), q_k = delta_k / (1 + delta_k),
/// lambda = kappa - 1, eta(x_2k) = 0, eta(x_2k+1) = (1 + delta_k)/2. The
/// remaining mass 2^(-K-1) sits on one extra label with eta = 0, where every
/// f_j agrees with f*.
struct MarginGapInstance {
  DiscreteDistribution dist;
  std::vector<LossFunction> fs;
  LossFunction fstar;
  double kappa;
  double lambda;
  std::size_t depth;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> delta;

  std::size_t absorbing_label() const noexcept { return 2 * depth + 2; }
  /// b(k) = p_k q_k, the common excess risk of f_2k and f_2k+1.
  double b(std::size_t k) const { return p.at(k) * q.at(k); }
};

/// fs[j] is the 0-1 loss of u_j, the Bayes predictor flipped at x_j,
/// for j = 0..num_functions-1. Requires kappa > 1, depth >= 2 and
/// num_functions <= 2 * depth.
MarginGapInstance build_margin_gap(double kappa, std::size_t depth, std::size_t num_functions);

/// Random P on `num_labels` labels: X-marginal from normalized uniforms,
/// eta drawn uniformly in [0,1].
DiscreteDistribution random_distribution(std::size_t num_labels, std::uint64_t seed);

/// Two labels with mass 1/2 each, eta = (0, 1): f* is exact and the
/// loss of the all-zero predictor differs from f* on a fair coin.
DiscreteDistribution fair_coin_distribution();

/// Three-model non-nested family on four labels (eight atoms) used by the
/// general oracle-inequality experiment.
struct GeneralInstance {
  DiscreteDistribution dist;
  LossFunction fstar;
  std::vector<std::vector<std::uint8_t>> predictors;
};
GeneralInstance build_general_instance();

} // namespace marginsel
