#pragma once

// Monte Carlo experiment driver.
//
// Every replicate draws from its own derived seed, so results do not depend
// on the thread count or on scheduling; records are kept in replicate order.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "marginsel/binomial.hpp"
#include "marginsel/complexity.hpp"
#include "marginsel/distributions.hpp"
#include "marginsel/rule_plugin.hpp"

namespace marginsel {

enum class ExperimentKind { counterexample, nested, coverage, margin_gap, binomial_floor };

std::string to_string(ExperimentKind kind);
/// Throws std::invalid_argument on an unknown name.
ExperimentKind parse_experiment(const std::string& name);

/// Selection rule between the two singletons of the counterexample.
struct RuleSpec {
  enum class Kind { erm, constant, randomized, external };

  Kind kind = Kind::erm;
  int constant_model = 1;
  /// Randomized rule: probability of selecting model 1.
  double probability = 0.5;
  std::string command;
  ExternalRule::Output external_output = ExternalRule::Output::model_index;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::counterexample;
  std::vector<std::size_t> n_list;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;

  // counterexample
  RuleSpec rule;
  int truth = 1;
  double C4 = 1.0 / 3.0;

  // nested: family is "odd-chain" (nested chain) or "general" (three
  // non-nested models on eight atoms)
  std::string family = "odd-chain";
  double kappa = 2.0;
  std::size_t num_models = 4;
  /// Confidence level t; empty means ln(number of models) + 3 ln n.
  std::optional<double> t;
  double pen_scale = 3.5;
  ComplexityConfig complexity;
  double c = 5.0 / 7.0;
  double general_c = 0.5;
  std::vector<double> eps_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  // coverage: family is "fair-coin" or "general"
  std::vector<double> t_list;

  // binomial-floor
  double a = 1.0;
  double b = 1.0;
  double floor_c = 0.4;
  bool exact = true;

  /// Throws std::invalid_argument when replicates == 0, n_list is empty or
  /// an experiment-specific parameter is out of range.
  void validate() const;
};

/// Output directory from MARGINSEL_OUT_DIR, or the working directory.
std::filesystem::path default_output_dir();

/// ln(card M) + 3 ln n.
double auto_confidence(std::size_t num_models, std::size_t n);

/// Seed of replicate r at sample size n.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n, std::size_t r);

/// Runs body(i) for i in [0, count) on `threads` workers. The first
/// exception thrown by a body is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One Monte Carlo replicate. Flags are 1/0, or -1 where not applicable.
struct ReplicateRecord {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double t = kNaN;
  std::int64_t chosen = -1;
  double excess = kNaN;
  /// Counterexample: oracle benchmark. Oracle experiments: smallest
  /// right-hand side over the eps grid.
  double benchmark = kNaN;
  double threshold = kNaN;
  int failure = -1;
  int pen_minor = -1;
  int min_pen = -1;
  int bernstein = -1;
  int assumptions_ok = -1;
  int conclusion_holds = -1;
  std::size_t saturated = 0;
  std::vector<double> penalties;
  std::vector<double> delta_hat;
};

// ---- counterexample -------------------------------------------------------

struct CounterexampleBlock {
  std::size_t n = 0;
  double alpha = 0.0;
  double h = 0.0;
  double benchmark = 0.0;
  double threshold_factor = 0.0; // C4 sqrt(n) / ln n
  double threshold = 0.0;        // threshold_factor * benchmark
  double excess_f0 = 0.0;
  double excess_f1 = 0.0;
  std::size_t failures = 0;
  double p_hat = 0.0;
  double std_error = 0.0;
  double mean_excess = 0.0;
  double mean_excess_over_benchmark = 0.0;
  std::size_t chose_one = 0;
};

struct CounterexampleSummary {
  int truth = 1;
  std::vector<CounterexampleBlock> blocks;
  std::vector<ReplicateRecord> records;
};

/// Decision of a rule on one sample; `rule_seed` drives randomized rules.
int apply_rule(const RuleSpec& rule, const Sample& sample, std::uint64_t rule_seed);

CounterexampleSummary run_counterexample(const ExperimentConfig& cfg);

// ---- conditioned replay ---------------------------------------------------

/// Replay of a rule on samples conditioned on {every X_i = b, #{Y_i = 1} = k}.
struct ReplayReport {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t reps = 0;
  std::vector<std::uint8_t> decisions_p0;
  std::vector<std::uint8_t> decisions_p1;
  double pi_k_p0 = 0.0;
  double pi_k_p1 = 0.0;
  bool identical = false;
  /// ln of the conditional probability of one fixed arrangement under P_0,
  /// P_1 and the uniform law on arrangements, -ln C(n, k).
  double log_arrangement_p0 = 0.0;
  double log_arrangement_p1 = 0.0;
  double log_arrangement_uniform = 0.0;
};

/// Conditioned sample: X_i = b for all i, labels a uniform arrangement of k
/// ones among n positions, drawn for the distribution `j` of the pair.
Sample conditioned_sample(const CounterexampleInstance& inst, int j, std::size_t k, std::uint64_t seed);

ReplayReport replay_conditioned(const RuleSpec& rule, std::size_t n, std::size_t k, std::size_t reps,
                                std::uint64_t seed, unsigned threads = 1);

// ---- oracle-inequality experiments ----------------------------------------

struct OracleSummary {
  std::string family;
  std::size_t n = 0;
  double t = 0.0;
  std::size_t replicates = 0;
  std::size_t assumptions_ok = 0;
  std::size_t conclusion_holds = 0; // among assumption-satisfying replicates
  double assumption_fraction = 0.0;
  /// conclusion_holds / assumptions_ok, or NaN with no satisfying replicate.
  double conclusion_fraction = kNaN;
  std::size_t pen_minor_ok = 0;
  std::size_t min_pen_ok = 0;
  std::size_t bernstein_ok = 0;
  std::vector<double> excess_quantiles; // 0.5, 0.9, 0.99, 1.0
  double oracle_excess = 0.0;           // inf_m P(f_m - f*)
  std::vector<double> model_excess;     // P(f_m - f*)
  std::vector<double> margin_h;         // extracted h per model
  std::vector<double> delta_bar;        // ideal fixed point per model
  std::size_t saturated_replicates = 0;
  /// Fraction of (replicate, model) pairs with delta-hat >= delta-bar.
  double delta_hat_ge_bar = kNaN;
  std::vector<ReplicateRecord> records;
};

struct NestedSummary {
  std::vector<OracleSummary> blocks;
  bool passed() const;
};

/// Nested chain (family "odd-chain") with pen = pen_scale * delta-hat, or
/// the general three-model family with ideal-oracle penalties.
NestedSummary run_nested(const ExperimentConfig& cfg);

/// Margin-gap instance behind the chain at sample size n: 2 num_models + 2
/// functions, depth large enough that the truncated mass is below 1/(2n).
MarginGapInstance chain_instance(double kappa, std::size_t num_models, std::size_t n);

/// The chain F_m = {f_1, f_3, ..., f_(2m+1)}, m = 1..num_models, of a
/// margin-gap instance.
ModelFamily odd_chain(const MarginGapInstance& inst, std::size_t num_models);

/// M0 = {u1, u2}, M1 = {u3, u0}, M2 = {u4, u5, u6} of the general instance.
ModelFamily general_family(const GeneralInstance& inst);

// ---- coverage --------------------------------------------------------------

struct CoverageRecord {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double t = 0.0;
  std::vector<double> deviation; // |(P_n - P)(f_m - f*)|
  std::vector<double> radius;    // v(m) + t/(3n)
  std::vector<std::uint8_t> covered;
};

struct CoverageBlock {
  std::size_t n = 0;
  double t = 0.0;
  std::vector<double> coverage; // per model
  double required = 0.0;        // 1 - 2 e^-t - 3 sigma
  bool passed = false;
};

struct CoverageSummary {
  std::string family;
  std::size_t replicates = 0;
  std::vector<CoverageBlock> blocks;
  std::vector<CoverageRecord> records;
  bool passed() const;
};

CoverageSummary run_coverage(const ExperimentConfig& cfg);

// ---- margin gap --------------------------------------------------------------

struct MarginGapBlock {
  std::size_t n = 0;
  std::size_t num_functions = 0; // M_n + 1 singletons f_0..f_(M_n)
  double local_benchmark = 0.0;
  std::size_t argmin_index = 0; // even index 2k achieving the infimum
  double argmin_excess = 0.0;
  double bound = 0.0;           // 2 ln(n) / n
  double global_shape = 0.0;    // n^(-kappa / (2 kappa - 1))
  double ratio = 0.0;           // local / global
  bool within_bound = false;
};

struct MarginGapSummary {
  double kappa = 0.0;
  std::vector<MarginGapBlock> blocks;
  bool ratio_decreasing = false;
  bool passed() const;
};

MarginGapSummary run_margin_gap(const ExperimentConfig& cfg);

// ---- binomial floor ------------------------------------------------------------

struct BinomialFloorSummary {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  bool exact = true;
  std::vector<FloorReport> floors;
};

BinomialFloorSummary run_binomial_floor(const ExperimentConfig& cfg);

// ---- output ---------------------------------------------------------------------

/// Shortest round-trip decimal form; "nan" and "inf" spelled out.
std::string format_number(double value);

/// CSV documents; column orders are listed by csv_schema().
std::string to_csv(const CounterexampleSummary& summary);
std::string to_csv(const NestedSummary& summary);
std::string to_csv(const CoverageSummary& summary);
std::string to_csv(const MarginGapSummary& summary);
std::string to_csv(const BinomialFloorSummary& summary);

/// Human-readable CSV column description for every experiment.
std::string csv_schema();

} // namespace marginsel
