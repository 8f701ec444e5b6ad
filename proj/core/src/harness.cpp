#include "marginsel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "marginsel/classes.hpp"
#include "marginsel/erm.hpp"
#include "marginsel/rng.hpp"
#include "marginsel/selection.hpp"

namespace marginsel {

namespace {

std::size_t ceil_log2(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

// f_m(x, y) = 1{y != m} on the two-label domain; the tables do not depend on n.
const ModelFamily& counterexample_singletons() {
  static const ModelFamily family = [] {
    const auto inst = build_counterexample(2);
    return ModelFamily({Model("F_0", {inst.f0}), Model("F_1", {inst.f1})}, false);
  }();
  return family;
}

double nearest_rank(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return kNaN;
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

int flag(bool b) { return b ? 1 : 0; }

struct OracleProblem {
  std::optional<MarginGapInstance> gap;
  std::optional<GeneralInstance> general;
  std::optional<ModelFamily> family;
  const DiscreteDistribution* dist = nullptr;
  const LossFunction* fstar = nullptr;
};

void build_oracle_problem(OracleProblem& prob, const std::string& family, double kappa, std::size_t num_models,
                          std::size_t n) {
  if (family == "odd-chain") {
    prob.gap.emplace(chain_instance(kappa, num_models, n));
    prob.family.emplace(odd_chain(*prob.gap, num_models));
    prob.dist = &prob.gap->dist;
    prob.fstar = &prob.gap->fstar;
  } else if (family == "general") {
    prob.general.emplace(build_general_instance());
    prob.family.emplace(general_family(*prob.general));
    prob.dist = &prob.general->dist;
    prob.fstar = &prob.general->fstar;
  } else {
    throw std::invalid_argument("unknown family '" + family + "'");
  }
}

} // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
  case ExperimentKind::counterexample:
    return "counterexample";
  case ExperimentKind::nested:
    return "nested";
  case ExperimentKind::coverage:
    return "coverage";
  case ExperimentKind::margin_gap:
    return "margin-gap";
  case ExperimentKind::binomial_floor:
    return "binomial-floor";
  }
  return "unknown";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto kind : {ExperimentKind::counterexample, ExperimentKind::nested, ExperimentKind::coverage,
                    ExperimentKind::margin_gap, ExperimentKind::binomial_floor}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (replicates == 0) throw std::invalid_argument("replicates must be >= 1");
  if (n_list.empty()) throw std::invalid_argument("n list must be nonempty");
  for (auto n : n_list) {
    if (n < 2) throw std::invalid_argument("every n must be >= 2");
  }
  switch (experiment) {
  case ExperimentKind::counterexample:
    if (truth != 0 && truth != 1) throw std::invalid_argument("truth must be 0 or 1");
    if (!(C4 > 0.0)) throw std::invalid_argument("C4 must be > 0");
    if (rule.kind == RuleSpec::Kind::constant && rule.constant_model != 0 && rule.constant_model != 1) {
      throw std::invalid_argument("constant rule must select model 0 or 1");
    }
    if (rule.kind == RuleSpec::Kind::randomized && !(rule.probability >= 0.0 && rule.probability <= 1.0)) {
      throw std::invalid_argument("randomized rule probability must lie in [0, 1]");
    }
    if (rule.kind == RuleSpec::Kind::external && rule.command.empty()) {
      throw std::invalid_argument("external rule needs a command");
    }
    break;
  case ExperimentKind::nested:
    if (family != "odd-chain" && family != "general") throw std::invalid_argument("unknown family '" + family + "'");
    if (!(kappa > 1.0)) throw std::invalid_argument("kappa must be > 1");
    if (num_models == 0) throw std::invalid_argument("num_models must be >= 1");
    if (t && !(*t > 0.0)) throw std::invalid_argument("t must be > 0");
    if (!(pen_scale > 0.0)) throw std::invalid_argument("penalty scale must be > 0");
    if (!(c > 0.0 && c < 1.0) || !(general_c > 0.0 && general_c < 1.0)) {
      throw std::invalid_argument("c must lie in (0, 1)");
    }
    if (eps_grid.empty()) throw std::invalid_argument("eps grid must be nonempty");
    for (double e : eps_grid) {
      if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    }
    complexity.validate();
    break;
  case ExperimentKind::coverage:
    if (family != "fair-coin" && family != "general") throw std::invalid_argument("unknown family '" + family + "'");
    if (t_list.empty()) throw std::invalid_argument("t list must be nonempty");
    for (double v : t_list) {
      if (!(v > 0.0)) throw std::invalid_argument("t must be > 0");
    }
    break;
  case ExperimentKind::margin_gap:
    if (!(kappa > 1.0)) throw std::invalid_argument("kappa must be > 1");
    break;
  case ExperimentKind::binomial_floor:
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("a and b must be > 0");
    if (!(floor_c > 0.0 && floor_c < 0.5)) throw std::invalid_argument("c must lie in (0, 1/2)");
    break;
  }
}

std::filesystem::path default_output_dir() {
  const char* env = std::getenv("MARGINSEL_OUT_DIR");
  if (env != nullptr && *env != '\0') return env;
  return std::filesystem::current_path();
}

double auto_confidence(std::size_t num_models, std::size_t n) {
  return std::log(static_cast<double>(num_models)) + 3.0 * std::log(static_cast<double>(n));
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n, std::size_t r) {
  return derive_seed(derive_seed(seed, n), r);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop.store(true);
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

// ---- counterexample -------------------------------------------------------

int apply_rule(const RuleSpec& rule, const Sample& sample, std::uint64_t rule_seed) {
  const CounterRng rng(rule_seed, kRuleStream);
  switch (rule.kind) {
  case RuleSpec::Kind::erm: {
    const auto& family = counterexample_singletons();
    const std::vector<double> zero(family.size(), 0.0);
    return static_cast<int>(select_with_penalties(family, sample, zero, std::nullopt).chosen);
  }
  case RuleSpec::Kind::constant:
    return rule.constant_model;
  case RuleSpec::Kind::randomized:
    return rng.uniform(0) < rule.probability ? 1 : 0;
  case RuleSpec::Kind::external: {
    const ExternalRule ext(rule.command, rule.external_output);
    const double value = ext.run(sample);
    if (rule.external_output == ExternalRule::Output::probability) return rng.uniform(0) < value ? 1 : 0;
    if (value != 0.0 && value != 1.0) throw std::runtime_error("external rule: model index must be 0 or 1");
    return static_cast<int>(value);
  }
  }
  throw std::logic_error("apply_rule: unknown rule kind");
}

CounterexampleSummary run_counterexample(const ExperimentConfig& cfg) {
  cfg.validate();
  CounterexampleSummary summary;
  summary.truth = cfg.truth;
  for (std::size_t n : cfg.n_list) {
    const auto inst = build_counterexample(n);
    const auto& dist = inst.dist(cfg.truth);
    const auto& fstar = inst.fstar(cfg.truth);

    CounterexampleBlock block;
    block.n = n;
    block.alpha = inst.alpha;
    block.h = inst.h;
    block.benchmark = oracle_benchmark(inst, cfg.truth);
    block.threshold_factor = cfg.C4 * std::sqrt(static_cast<double>(n)) / std::log(static_cast<double>(n));
    block.threshold = block.threshold_factor * block.benchmark;
    block.excess_f0 = excess_risk(inst.f0, dist, fstar);
    block.excess_f1 = excess_risk(inst.f1, dist, fstar);

    std::vector<ReplicateRecord> records(cfg.replicates);
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
      auto& rec = records[r];
      rec.replicate = r;
      rec.seed = replicate_seed(cfg.seed, n, r);
      rec.n = n;
      const Sample sample = draw_sample(dist, n, rec.seed);
      const int m = apply_rule(cfg.rule, sample, rec.seed);
      rec.chosen = m;
      rec.excess = m == 0 ? block.excess_f0 : block.excess_f1;
      rec.benchmark = block.benchmark;
      rec.threshold = block.threshold;
      rec.failure = flag(rec.excess >= block.threshold);
    });

    double sum_excess = 0.0;
    for (const auto& rec : records) {
      block.failures += static_cast<std::size_t>(rec.failure);
      block.chose_one += rec.chosen == 1 ? 1 : 0;
      sum_excess += rec.excess;
    }
    const double reps = static_cast<double>(cfg.replicates);
    block.p_hat = static_cast<double>(block.failures) / reps;
    block.std_error = std::sqrt(block.p_hat * (1.0 - block.p_hat) / reps);
    block.mean_excess = sum_excess / reps;
    block.mean_excess_over_benchmark = block.mean_excess / block.benchmark;
    summary.blocks.push_back(block);
    summary.records.insert(summary.records.end(), records.begin(), records.end());
  }
  return summary;
}

// ---- conditioned replay ---------------------------------------------------

Sample conditioned_sample(const CounterexampleInstance& inst, int j, std::size_t k, std::uint64_t seed) {
  const std::size_t n = inst.n;
  if (k > n) throw std::invalid_argument("conditioned_sample: k must be <= n");
  const auto& dist = inst.dist(j);
  const std::size_t b = CounterexampleInstance::kLabelB;
  if (!(dist.mass(atom_index(b, 0)) > 0.0) || !(dist.mass(atom_index(b, 1)) > 0.0)) {
    throw std::invalid_argument("conditioned_sample: conditioning event has probability 0");
  }
  // Given the count, a product measure puts equal mass on every arrangement,
  // so position i carries a one with probability (ones left)/(slots left).
  const CounterRng rng(seed, kSampleStream);
  std::vector<std::uint32_t> draws(n);
  std::size_t ones_left = k;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slots_left = n - i;
    const bool one = rng.uniform(i) * static_cast<double>(slots_left) < static_cast<double>(ones_left);
    if (one) --ones_left;
    draws[i] = static_cast<std::uint32_t>(atom_index(b, one ? 1 : 0));
  }
  return Sample(std::move(draws), dist.num_atoms(), seed);
}

ReplayReport replay_conditioned(const RuleSpec& rule, std::size_t n, std::size_t k, std::size_t reps,
                                std::uint64_t seed, unsigned threads) {
  if (reps == 0) throw std::invalid_argument("replay_conditioned: reps must be >= 1");
  const auto inst = build_counterexample(n);
  ReplayReport report;
  report.n = n;
  report.k = k;
  report.reps = reps;
  report.decisions_p0.resize(reps);
  report.decisions_p1.resize(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    const std::uint64_t s = derive_seed(seed, r);
    report.decisions_p0[r] = static_cast<std::uint8_t>(apply_rule(rule, conditioned_sample(inst, 0, k, s), s));
    report.decisions_p1[r] = static_cast<std::uint8_t>(apply_rule(rule, conditioned_sample(inst, 1, k, s), s));
  });
  std::size_t ones0 = 0, ones1 = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    ones0 += report.decisions_p0[r];
    ones1 += report.decisions_p1[r];
  }
  report.pi_k_p0 = static_cast<double>(ones0) / static_cast<double>(reps);
  report.pi_k_p1 = static_cast<double>(ones1) / static_cast<double>(reps);
  report.identical = report.decisions_p0 == report.decisions_p1;

  // P_j(arrangement | all b, k ones) = P_j(arrangement) / P_j(all b, k ones),
  // with the denominator from the binomial pmf.
  const std::size_t b = CounterexampleInstance::kLabelB;
  auto log_arrangement = [&](int j) {
    const auto& dist = inst.dist(j);
    const double kd = static_cast<double>(k);
    const double nd = static_cast<double>(n);
    const double joint = kd * std::log(dist.mass(atom_index(b, 1))) + (nd - kd) * std::log(dist.mass(atom_index(b, 0)));
    const double event = std::log(binom_pmf(n, dist.eta(b), k)) + nd * std::log(dist.x_mass(b));
    return joint - event;
  };
  report.log_arrangement_p0 = log_arrangement(0);
  report.log_arrangement_p1 = log_arrangement(1);
  report.log_arrangement_uniform = -(std::lgamma(static_cast<double>(n) + 1.0) -
                                     std::lgamma(static_cast<double>(k) + 1.0) -
                                     std::lgamma(static_cast<double>(n - k) + 1.0));
  return report;
}

// ---- oracle-inequality experiments ----------------------------------------

MarginGapInstance chain_instance(double kappa, std::size_t num_models, std::size_t n) {
  const std::size_t num_functions = 2 * num_models + 2;
  const std::size_t depth = std::max({num_functions / 2, ceil_log2(n) + 1, std::size_t{2}});
  return build_margin_gap(kappa, depth, num_functions);
}

ModelFamily odd_chain(const MarginGapInstance& inst, std::size_t num_models) {
  if (num_models == 0) throw std::invalid_argument("odd_chain: need at least one model");
  if (inst.fs.size() < 2 * num_models + 2) throw std::invalid_argument("odd_chain: too few functions");
  std::vector<Model> models;
  for (std::size_t m = 1; m <= num_models; ++m) {
    std::vector<LossFunction> fs;
    for (std::size_t k = 0; k <= m; ++k) fs.push_back(inst.fs[2 * k + 1]);
    models.emplace_back("F_" + std::to_string(m), std::move(fs));
  }
  return ModelFamily(std::move(models), true);
}

ModelFamily general_family(const GeneralInstance& inst) {
  const auto& u = inst.predictors;
  if (u.size() < 7) throw std::invalid_argument("general_family: need seven predictors");
  return ModelFamily({model_from_predictors("M0", {u[1], u[2]}), model_from_predictors("M1", {u[3], u[0]}),
                      model_from_predictors("M2", {u[4], u[5], u[6]})},
                     false);
}

bool NestedSummary::passed() const {
  return std::all_of(blocks.begin(), blocks.end(),
                     [](const OracleSummary& b) { return b.conclusion_holds == b.assumptions_ok; });
}

NestedSummary run_nested(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool chain = cfg.family == "odd-chain";
  const double C1 = std::sqrt(2.0);
  const double C2 = 2.0 / (cfg.complexity.Kbar * cfg.complexity.q);
  NestedSummary summary;
  for (std::size_t n : cfg.n_list) {
    OracleProblem prob;
    build_oracle_problem(prob, cfg.family, cfg.kappa, cfg.num_models, n);
    const ModelFamily& family = *prob.family;
    const DiscreteDistribution& dist = *prob.dist;
    const LossFunction& fstar = *prob.fstar;
    const Truth truth{dist, fstar};
    const std::size_t count = family.size();

    OracleSummary block;
    block.family = cfg.family;
    block.n = n;
    block.t = cfg.t ? *cfg.t : auto_confidence(count, n);
    block.replicates = cfg.replicates;
    const std::vector<double> t_m(count, block.t);
    ComplexityConfig ccfg = cfg.complexity;
    ccfg.t = block.t;

    std::vector<MarginFunction> margins;
    for (std::size_t m = 0; m < count; ++m) {
      const Model& model = family[m];
      block.model_excess.push_back(excess_risk(model[population_minimizer(model, dist)], dist, fstar));
      const auto fit = extract_margin(model, dist, fstar);
      block.margin_h.push_back(fit.h);
      margins.push_back(fit.phi);
      if (chain) block.delta_bar.push_back(fixed_point_ideal(model, dist, n, ccfg).delta);
    }
    block.oracle_excess = *std::min_element(block.model_excess.begin(), block.model_excess.end());

    std::vector<ReplicateRecord> records(cfg.replicates);
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
      auto& rec = records[r];
      rec.replicate = r;
      rec.seed = replicate_seed(cfg.seed, n, r);
      rec.n = n;
      rec.t = block.t;
      const Sample sample = draw_sample(dist, n, rec.seed);
      double c = cfg.general_c;
      if (chain) {
        c = cfg.c;
        const LocalRademacherPenalty lr{cfg.pen_scale, ccfg, rec.seed};
        for (const auto& report : local_rademacher_complexities(family, sample, lr, t_m)) {
          rec.delta_hat.push_back(report.delta);
          rec.penalties.push_back(cfg.pen_scale * report.delta);
          rec.saturated += report.saturated ? 1 : 0;
        }
      } else {
        rec.penalties = compute_penalties(family, sample, IdealOraclePenalty{1.0, cfg.general_c}, t_m, truth);
      }
      const auto outcome = select_with_penalties(family, sample, rec.penalties, truth);
      rec.chosen = static_cast<std::int64_t>(outcome.chosen);
      rec.excess = outcome.excess;

      const auto check = assumption_checker(family, sample, dist, fstar, rec.penalties, c, t_m, C1, C2);
      rec.pen_minor = flag(check.all_pen_minor());
      rec.bernstein = flag(check.all_bernstein());
      if (chain) {
        rec.min_pen = flag(check.all_min_pen());
        rec.assumptions_ok = flag(rec.pen_minor && rec.min_pen && rec.bernstein);
      } else {
        rec.assumptions_ok = flag(rec.pen_minor && rec.bernstein);
      }

      bool holds = true;
      double tightest = std::numeric_limits<double>::infinity();
      for (double eps : cfg.eps_grid) {
        double rhs = 0.0;
        if (chain) {
          rhs = oracle_rhs_nested(family, dist, fstar, rec.penalties, t_m, C1, C2, eps, n, margins);
        } else {
          const auto g = oracle_rhs_general(family, dist, fstar, rec.penalties, t_m, c, eps, n);
          rhs = g.main + g.v_n;
        }
        tightest = std::min(tightest, rhs);
        holds = holds && rec.excess <= rhs + kCompareTol;
      }
      rec.benchmark = tightest;
      rec.conclusion_holds = flag(holds);
    });

    std::vector<double> excess;
    std::size_t ge_bar = 0;
    for (const auto& rec : records) {
      excess.push_back(rec.excess);
      block.pen_minor_ok += static_cast<std::size_t>(rec.pen_minor == 1);
      block.min_pen_ok += static_cast<std::size_t>(rec.min_pen == 1);
      block.bernstein_ok += static_cast<std::size_t>(rec.bernstein == 1);
      block.saturated_replicates += rec.saturated > 0 ? 1 : 0;
      if (rec.assumptions_ok == 1) {
        ++block.assumptions_ok;
        block.conclusion_holds += static_cast<std::size_t>(rec.conclusion_holds == 1);
      }
      for (std::size_t m = 0; m < rec.delta_hat.size(); ++m) {
        ge_bar += rec.delta_hat[m] >= block.delta_bar[m] ? 1 : 0;
      }
    }
    const double reps = static_cast<double>(cfg.replicates);
    block.assumption_fraction = static_cast<double>(block.assumptions_ok) / reps;
    if (block.assumptions_ok > 0) {
      block.conclusion_fraction =
          static_cast<double>(block.conclusion_holds) / static_cast<double>(block.assumptions_ok);
    }
    if (chain) block.delta_hat_ge_bar = static_cast<double>(ge_bar) / (reps * static_cast<double>(count));
    std::sort(excess.begin(), excess.end());
    for (double p : {0.5, 0.9, 0.99, 1.0}) block.excess_quantiles.push_back(nearest_rank(excess, p));
    block.records = std::move(records);
    summary.blocks.push_back(std::move(block));
  }
  return summary;
}

// ---- coverage --------------------------------------------------------------

bool CoverageSummary::passed() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const CoverageBlock& b) { return b.passed; });
}

CoverageSummary run_coverage(const ExperimentConfig& cfg) {
  cfg.validate();
  std::optional<GeneralInstance> general;
  std::optional<ModelFamily> family;
  std::optional<DiscreteDistribution> dist;
  std::optional<LossFunction> fstar;
  if (cfg.family == "fair-coin") {
    dist.emplace(fair_coin_distribution());
    fstar.emplace(bayes_loss(*dist));
    const std::vector<std::uint8_t> zero(dist->num_labels(), 0);
    family.emplace(std::vector<Model>{Model("F_0", {*fstar}), Model("F_1", {LossFunction::zero_one(0, zero)})},
                   false);
  } else {
    general.emplace(build_general_instance());
    family.emplace(general_family(*general));
    dist.emplace(general->dist);
    fstar.emplace(general->fstar);
  }
  const std::size_t count = family->size();
  std::vector<const LossFunction*> fm(count);
  std::vector<double> var(count);
  for (std::size_t m = 0; m < count; ++m) {
    const Model& model = (*family)[m];
    fm[m] = &model[population_minimizer(model, *dist)];
    var[m] = population_variance(*fm[m], *fstar, *dist);
  }

  CoverageSummary summary;
  summary.family = cfg.family;
  summary.replicates = cfg.replicates;
  for (std::size_t n : cfg.n_list) {
    const double nd = static_cast<double>(n);
    for (double t : cfg.t_list) {
      std::vector<CoverageRecord> records(cfg.replicates);
      parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
        auto& rec = records[r];
        rec.replicate = r;
        rec.seed = replicate_seed(cfg.seed, n, r);
        rec.n = n;
        rec.t = t;
        const Sample sample = draw_sample(*dist, n, rec.seed);
        for (std::size_t m = 0; m < count; ++m) {
          const double dev = std::abs(centered_difference(*fm[m], *fstar, sample, *dist));
          const double radius = std::sqrt(2.0 * t / nd * var[m]) + t / (3.0 * nd);
          rec.deviation.push_back(dev);
          rec.radius.push_back(radius);
          rec.covered.push_back(static_cast<std::uint8_t>(dev <= radius + kCompareTol));
        }
      });
      CoverageBlock block;
      block.n = n;
      block.t = t;
      block.coverage.assign(count, 0.0);
      for (const auto& rec : records) {
        for (std::size_t m = 0; m < count; ++m) block.coverage[m] += rec.covered[m];
      }
      const double reps = static_cast<double>(cfg.replicates);
      for (auto& c : block.coverage) c /= reps;
      const double level = std::max(0.0, 1.0 - 2.0 * std::exp(-t));
      block.required = level - 3.0 * std::sqrt(level * (1.0 - level) / reps);
      block.passed = std::all_of(block.coverage.begin(), block.coverage.end(),
                                 [&](double c) { return c >= block.required; });
      summary.blocks.push_back(block);
      summary.records.insert(summary.records.end(), records.begin(), records.end());
    }
  }
  return summary;
}

// ---- margin gap --------------------------------------------------------------

bool MarginGapSummary::passed() const {
  return ratio_decreasing &&
         std::all_of(blocks.begin(), blocks.end(), [](const MarginGapBlock& b) { return b.within_bound; });
}

MarginGapSummary run_margin_gap(const ExperimentConfig& cfg) {
  cfg.validate();
  MarginGapSummary summary;
  summary.kappa = cfg.kappa;
  for (std::size_t n : cfg.n_list) {
    const double nd = static_cast<double>(n);
    const std::size_t mn = 2 * ceil_log2(n); // M_n >= 2 log2 n, even
    const auto inst = build_margin_gap(cfg.kappa, mn / 2 + 1, mn + 1);
    MarginGapBlock block;
    block.n = n;
    block.num_functions = mn + 1;
    block.local_benchmark = std::numeric_limits<double>::infinity();
    const double slack = std::log(nd) / nd;
    for (std::size_t j = 0; j <= mn; j += 2) {
      const double e = excess_risk(inst.fs[j], inst.dist, inst.fstar);
      if (e + slack < block.local_benchmark) {
        block.local_benchmark = e + slack;
        block.argmin_index = j;
        block.argmin_excess = e;
      }
    }
    block.bound = 2.0 * slack;
    block.global_shape = std::pow(nd, -cfg.kappa / (2.0 * cfg.kappa - 1.0));
    block.ratio = block.local_benchmark / block.global_shape;
    block.within_bound = block.local_benchmark <= block.bound + kCompareTol;
    summary.blocks.push_back(block);
  }
  // compared in increasing n, whatever the order of the n list
  std::vector<const MarginGapBlock*> by_n;
  for (const auto& b : summary.blocks) by_n.push_back(&b);
  std::stable_sort(by_n.begin(), by_n.end(), [](const auto* a, const auto* b) { return a->n < b->n; });
  summary.ratio_decreasing = true;
  for (std::size_t i = 1; i < by_n.size(); ++i) {
    if (by_n[i]->n > by_n[i - 1]->n && !(by_n[i]->ratio < by_n[i - 1]->ratio)) summary.ratio_decreasing = false;
  }
  return summary;
}

// ---- binomial floor ------------------------------------------------------------

BinomialFloorSummary run_binomial_floor(const ExperimentConfig& cfg) {
  cfg.validate();
  BinomialFloorSummary summary;
  summary.a = cfg.a;
  summary.b = cfg.b;
  summary.c = cfg.floor_c;
  summary.exact = cfg.exact;
  summary.floors.resize(cfg.n_list.size());
  parallel_for(cfg.n_list.size(), cfg.threads, [&](std::size_t i) {
    summary.floors[i] = pmf_floor(cfg.n_list[i], cfg.a, cfg.b, cfg.floor_c, cfg.exact);
  });
  return summary;
}

// ---- output ---------------------------------------------------------------------

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

class CsvWriter {
public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

private:
  std::ostringstream out_;
};

std::string num(double v) { return format_number(v); }
template <class I>
std::string integer(I v) {
  return std::to_string(v);
}

} // namespace

std::string to_csv(const CounterexampleSummary& summary) {
  CsvWriter csv({"replicate", "seed", "n", "truth", "chosen", "excess", "benchmark", "threshold", "failure"});
  for (const auto& r : summary.records) {
    csv.row({integer(r.replicate), integer(r.seed), integer(r.n), integer(summary.truth), integer(r.chosen),
             num(r.excess), num(r.benchmark), num(r.threshold), integer(r.failure)});
  }
  return csv.str();
}

std::string to_csv(const NestedSummary& summary) {
  std::size_t num_pen = 0, num_delta = 0;
  for (const auto& b : summary.blocks) {
    for (const auto& r : b.records) {
      num_pen = std::max(num_pen, r.penalties.size());
      num_delta = std::max(num_delta, r.delta_hat.size());
    }
  }
  std::vector<std::string> header{"family",  "replicate", "seed",     "n",         "t",
                                  "chosen",  "excess",    "rhs_min",  "pen_minor", "min_pen",
                                  "bernstein", "assumptions_ok", "conclusion_holds", "saturated"};
  for (std::size_t m = 0; m < num_pen; ++m) header.push_back("pen_" + std::to_string(m));
  for (std::size_t m = 0; m < num_delta; ++m) header.push_back("delta_hat_" + std::to_string(m));
  CsvWriter csv(header);
  for (const auto& b : summary.blocks) {
    for (const auto& r : b.records) {
      std::vector<std::string> cells{b.family,         integer(r.replicate),        integer(r.seed),
                                     integer(r.n),     num(r.t),                    integer(r.chosen),
                                     num(r.excess),    num(r.benchmark),            integer(r.pen_minor),
                                     integer(r.min_pen), integer(r.bernstein),      integer(r.assumptions_ok),
                                     integer(r.conclusion_holds), integer(r.saturated)};
      for (std::size_t m = 0; m < num_pen; ++m) cells.push_back(m < r.penalties.size() ? num(r.penalties[m]) : "");
      for (std::size_t m = 0; m < num_delta; ++m) {
        cells.push_back(m < r.delta_hat.size() ? num(r.delta_hat[m]) : "");
      }
      csv.row(cells);
    }
  }
  return csv.str();
}

std::string to_csv(const CoverageSummary& summary) {
  const std::size_t count = summary.records.empty() ? 0 : summary.records.front().deviation.size();
  std::vector<std::string> header{"replicate", "seed", "n", "t"};
  for (std::size_t m = 0; m < count; ++m) {
    header.push_back("deviation_" + std::to_string(m));
    header.push_back("radius_" + std::to_string(m));
    header.push_back("covered_" + std::to_string(m));
  }
  CsvWriter csv(header);
  for (const auto& r : summary.records) {
    std::vector<std::string> cells{integer(r.replicate), integer(r.seed), integer(r.n), num(r.t)};
    for (std::size_t m = 0; m < count; ++m) {
      cells.push_back(num(r.deviation[m]));
      cells.push_back(num(r.radius[m]));
      cells.push_back(integer(static_cast<int>(r.covered[m])));
    }
    csv.row(cells);
  }
  return csv.str();
}

std::string to_csv(const MarginGapSummary& summary) {
  CsvWriter csv({"n", "kappa", "num_functions", "local_benchmark", "argmin_index", "argmin_excess", "bound",
                 "global_shape", "ratio", "within_bound"});
  for (const auto& b : summary.blocks) {
    csv.row({integer(b.n), num(summary.kappa), integer(b.num_functions), num(b.local_benchmark),
             integer(b.argmin_index), num(b.argmin_excess), num(b.bound), num(b.global_shape), num(b.ratio),
             integer(flag(b.within_bound))});
  }
  return csv.str();
}

std::string to_csv(const BinomialFloorSummary& summary) {
  CsvWriter csv({"n", "a", "b", "c", "exact", "min_value", "argmin_k", "argmin_p", "points"});
  for (const auto& f : summary.floors) {
    csv.row({integer(f.n), num(summary.a), num(summary.b), num(summary.c), integer(flag(summary.exact)),
             num(f.min_value), integer(f.argmin.k), num(f.argmin.p), integer(f.grid.size())});
  }
  return csv.str();
}

std::string csv_schema() {
  return R"(CSV columns (one row per replicate unless noted, rows in n-list order then replicate order):
  counterexample: replicate,seed,n,truth,chosen,excess,benchmark,threshold,failure
  nested:         family,replicate,seed,n,t,chosen,excess,rhs_min,pen_minor,min_pen,bernstein,
                  assumptions_ok,conclusion_holds,saturated,pen_<m>...,delta_hat_<m>...
                  (flags are 1/0, -1 when not applicable; rhs_min is the smallest right-hand
                  side over the eps grid)
  coverage:       replicate,seed,n,t,deviation_<m>,radius_<m>,covered_<m>... (one row per
                  replicate and t)
  margin-gap:     n,kappa,num_functions,local_benchmark,argmin_index,argmin_excess,bound,
                  global_shape,ratio,within_bound (one row per n)
  binomial-floor: n,a,b,c,exact,min_value,argmin_k,argmin_p,points (one row per n)
)";
}

} // namespace marginsel
