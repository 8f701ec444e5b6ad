// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion, exit 1 if any fails
//   acceptance <k> ...    run only the listed criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "marginsel/binomial.hpp"
#include "marginsel/complexity.hpp"
#include "marginsel/distributions.hpp"
#include "marginsel/erm.hpp"
#include "marginsel/harness.hpp"
#include "marginsel/margin.hpp"

using namespace marginsel;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

std::string g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- 1: counterexample construction ---------------------------------------

void exact_counterexample(Verdict& v) {
  constexpr double tol = 1e-12;
  for (std::size_t n : {2u, 16u, 256u}) {
    const auto inst = build_counterexample(n);
    const double a = inst.alpha, h = inst.h;
    const double e0 = excess_risk(inst.f0, inst.p1, inst.fstar1);
    const double e1 = excess_risk(inst.f1, inst.p1, inst.fstar1);
    const double var = population_variance(inst.f1, inst.fstar1, inst.p1);
    const double bench = oracle_benchmark(inst);
    const double bound = (2 + 3 * std::log(double(n))) / (2 * double(n));
    const std::string tag = "n=" + std::to_string(n);
    v.require(std::abs(e0 - 2 * (1 - a) * h) <= tol, tag + " excess f0");
    v.require(std::abs(e1 - a) <= tol, tag + " excess f1");
    v.require(std::abs(var - (a - a * a)) <= tol, tag + " variance");
    v.require(bench <= bound, tag + " benchmark " + g(bench) + " > " + g(bound));
    v.detail << tag << " benchmark " << g(bench) << " <= " << g(bound) << "; ";
  }
}

// ---- 2: margin-gap sequence -------------------------------------------------

void margin_gap_sequence(Verdict& v) {
  for (double kappa : {1.5, 2.0, 3.0}) {
    const auto inst = build_margin_gap(kappa, 11, 22);
    for (std::size_t k = 0; k <= 10; ++k) {
      const std::string tag = "kappa=" + g(kappa) + " k=" + std::to_string(k);
      const double b = inst.b(k);
      const double lo = std::pow(2.0, -double(k) * kappa - 2), hi = std::pow(2.0, -double(k) * kappa - 1);
      v.require(lo <= b * (1 + 1e-12) && b <= hi * (1 + 1e-12), tag + " bracket");
      const double e_even = excess_risk(inst.fs[2 * k], inst.dist, inst.fstar);
      const double e_odd = excess_risk(inst.fs[2 * k + 1], inst.dist, inst.fstar);
      v.require(std::abs(e_even - b) <= 1e-15 && std::abs(e_odd - b) <= 1e-15, tag + " common excess");
      // Var(f_2k - f*) = b - b^2 <= P(f_2k - f*)
      const double var_even = population_variance(inst.fs[2 * k], inst.fstar, inst.dist);
      v.require(var_even <= e_even, tag + " even variance vs excess");
      const double var_odd = population_variance(inst.fs[2 * k + 1], inst.fstar, inst.dist);
      v.require(var_odd >= std::pow(2.0, -double(k) - 3), tag + " odd variance floor");
    }
  }
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::margin_gap;
  cfg.kappa = 2.0;
  cfg.n_list = {256, 1024, 4096};
  const auto s = run_margin_gap(cfg);
  for (const auto& b : s.blocks) {
    v.require(b.local_benchmark <= b.bound, "n=" + std::to_string(b.n) + " local benchmark above 2 ln n / n");
    v.detail << "n=" << b.n << " local " << g(b.local_benchmark) << " <= " << g(b.bound) << "; ";
  }
}

// ---- 3: binomial floor ------------------------------------------------------

void binomial_floor(Verdict& v) {
  constexpr double threshold = 0.1;
  for (std::uint64_t n : {16u, 64u, 256u, 1024u, 4096u}) {
    const auto r = pmf_floor(n, 1.0, 1.0, 0.4, true);
    v.require(r.min_value >= threshold, "n=" + std::to_string(n) + " floor " + g(r.min_value) + " < 0.1");
    v.detail << "n=" << n << " floor " << g(r.min_value) << "; ";
  }
  const double central = std::sqrt(1e4) * binom_pmf(10000, 0.5, 5000);
  v.require(std::abs(central - std::sqrt(2.0 / M_PI)) <= 1e-3, "central value");
  v.detail << "central " << g(central);
}

// ---- 4: Bernstein coverage ----------------------------------------------------

void bernstein_coverage(Verdict& v) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::coverage;
  cfg.family = "fair-coin";
  cfg.n_list = {100, 400};
  cfg.t_list = {std::log(20.0), std::log(100.0)};
  cfg.replicates = 10000;
  cfg.seed = 1;
  const auto s = run_coverage(cfg);
  for (const auto& b : s.blocks) {
    const double need = 1 - 2 * std::exp(-b.t) - 0.01;
    const double worst = *std::min_element(b.coverage.begin(), b.coverage.end());
    v.require(worst >= need, "n=" + std::to_string(b.n) + " t=" + g(b.t));
    v.detail << "n=" << b.n << " t=" << g(b.t) << " " << g(worst) << ">=" << g(need) << "; ";
  }
}

// ---- 5 and 6: oracle inequalities -------------------------------------------

void general_family_oracle(Verdict& v) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::nested;
  cfg.family = "general";
  cfg.n_list = {200};
  cfg.replicates = 2000;
  cfg.seed = 1;
  const auto& b = run_nested(cfg).blocks.at(0);
  v.require(b.assumptions_ok > 0, "no replicate satisfies the assumptions");
  v.require(b.conclusion_holds == b.assumptions_ok, "conclusion fails on a satisfying replicate");
  v.detail << "conclusion " << b.conclusion_holds << "/" << b.assumptions_ok << ", assumptions "
           << b.assumptions_ok << "/" << b.replicates;
}

void chain_oracle(Verdict& v) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::nested;
  cfg.family = "odd-chain";
  cfg.kappa = 2.0;
  cfg.num_models = 4;
  cfg.n_list = {512};
  cfg.replicates = 1000;
  cfg.seed = 1;
  const auto& b = run_nested(cfg).blocks.at(0);
  v.require(b.assumptions_ok > 0, "no replicate satisfies the assumptions");
  v.require(b.conclusion_holds == b.assumptions_ok, "conclusion fails on a satisfying replicate");
  v.require(b.assumption_fraction >= 0.5, "assumption fraction " + g(b.assumption_fraction) + " < 0.5");
  v.detail << "t " << g(b.t) << ", conclusion " << b.conclusion_holds << "/" << b.assumptions_ok
           << ", assumption fraction " << g(b.assumption_fraction);
}

// ---- 7: failure of selection between two singletons ------------------------------

void singleton_failure(Verdict& v) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::counterexample;
  cfg.n_list = {64, 256, 1024};
  cfg.replicates = 5000;
  cfg.seed = 1;
  const auto s = run_counterexample(cfg);
  for (const auto& b : s.blocks) {
    v.require(b.p_hat >= 0.05, "n=" + std::to_string(b.n) + " p_hat " + g(b.p_hat));
    v.detail << "n=" << b.n << " p_hat " << g(b.p_hat) << "; ";
  }
  v.require(s.blocks.back().p_hat >= 0.5 * s.blocks.front().p_hat, "estimate decays");
}

// ---- 8: conditioned replay ------------------------------------------------------

void conditioned_replay(Verdict& v) {
  std::vector<std::pair<std::string, RuleSpec>> rules;
  rules.emplace_back("erm", RuleSpec{});
  RuleSpec constant;
  constant.kind = RuleSpec::Kind::constant;
  rules.emplace_back("constant", constant);
  RuleSpec randomized;
  randomized.kind = RuleSpec::Kind::randomized;
  randomized.probability = 0.4;
  rules.emplace_back("randomized", randomized);
  RuleSpec external;
  external.kind = RuleSpec::Kind::external;
  // majority of the labels, ties to model 0
  external.command = "awk -F'\"y\":' '{ s += substr($2, 1, 1); n++ } END { print (2 * s > n) ? 1 : 0 }'";
  rules.emplace_back("external", external);

  const std::size_t n = 64;
  for (const auto& [name, rule] : rules) {
    const std::size_t reps = rule.kind == RuleSpec::Kind::external ? 40 : 500;
    for (std::size_t k : {std::size_t{0}, std::size_t{20}, n / 2, n / 2 + 1, n}) {
      const auto r = replay_conditioned(rule, n, k, reps, 7, 0);
      const std::string tag = name + " k=" + std::to_string(k);
      v.require(r.identical, tag + " decision streams differ");
      v.require(std::abs(r.log_arrangement_p0 - r.log_arrangement_uniform) <= 1e-9 &&
                    std::abs(r.log_arrangement_p1 - r.log_arrangement_uniform) <= 1e-9,
                tag + " arrangement law not uniform");
    }
  }
  v.detail << "rules erm/constant/randomized/external, k in {0,20,32,33,64}";
}

// ---- 9: property suites ----------------------------------------------------------------

bool certificate_ok(const ComplexityReport& r) {
  if (r.saturated) return r.certificate.back().suffix_sup > r.threshold;
  std::size_t idx = 0;
  while (r.certificate[idx].sigma < r.delta) ++idx;
  for (std::size_t i = idx; i < r.certificate.size(); ++i)
    if (r.certificate[i].ratio > r.threshold + 1e-12) return false;
  return idx == 0 || r.certificate[idx - 1].suffix_sup > r.threshold;
}

// Ideal fixed point with every modulus lowered by 3 standard errors and the
// grid step undone: a lower bound for the exact value up to Monte Carlo error.
double ideal_fixed_point_lower(const Model& model, const DiscreteDistribution& dist, std::size_t n,
                               const ComplexityConfig& cfg, bool& saturated) {
  const PopulationGeometry geo(model, dist);
  const auto mod = expected_modulus_by_prefix(model, dist, geo, n, cfg.mc_reps, cfg.seed);
  const double tn = cfg.t / double(n);
  auto u = [&](double s) {
    const auto k = geo.prefix_size(s);
    const double phi = std::max(0.0, mod[k - 1].mean - 3 * mod[k - 1].std_error);
    return cfg.Kbar * (phi + std::sqrt(geo.diameter_sq(k)) * std::sqrt(tn) + tn);
  };
  const auto pts = cfg.grid.points();
  const auto r = fixed_point_on_grid(pts, u, cfg.q, ComplexityKind::ideal);
  saturated = r.saturated;
  return r.delta / cfg.grid.ratio;
}

void property_suites(Verdict& v) {
  using marginsel::testing::random_nested_pair;
  const std::vector<double> levels{0.0, 0.005, 0.02, 0.05, 0.1, 0.25, 0.5, 1.0};

  // monotonicity, certificates, delta-hat in t
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pair = random_nested_pair(seed, 6, 3, 16);
    const std::size_t n = 40 + 10 * (seed % 7);
    const auto s = draw_sample(pair.dist, n, seed);
    const auto eps = rademacher_draw(n, seed + 1000);
    std::size_t prev_pop = 0, prev_emp = 0;
    double prev_d = -1, prev_de = -1, prev_r = -1, prev_mod = -1;
    for (double delta : levels) {
      const auto pop = minimal_set(pair.big, pair.dist, delta).members;
      const auto emp = minimal_set(pair.big, s, delta).members;
      const double d = diameter(pair.big, pair.dist, delta);
      const double de = diameter(pair.big, s, delta);
      const double r = rademacher_modulus(pair.big, s, delta, eps);
      const double mod = expected_modulus(pair.big, pair.dist, n, delta, 50, seed).mean;
      v.require(pop.size() >= prev_pop && emp.size() >= prev_emp, "minimal set not monotone");
      v.require(d >= prev_d && de >= prev_de, "diameter not monotone");
      v.require(r >= prev_r && mod >= prev_mod, "modulus not monotone");
      prev_pop = pop.size();
      prev_emp = emp.size();
      prev_d = d;
      prev_de = de;
      prev_r = r;
      prev_mod = mod;
    }
    ComplexityConfig cfg;
    cfg.mc_reps = 50;
    cfg.seed = seed;
    v.require(certificate_ok(fixed_point_ideal(pair.big, pair.dist, n, cfg)), "ideal certificate");
    double prev = 0.0;
    for (double t : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      cfg.t = t;
      const auto r = fixed_point_empirical(pair.big, s, cfg, eps);
      v.require(certificate_ok(r), "empirical certificate");
      v.require(r.delta >= prev, "delta-hat not monotone in t");
      prev = r.delta;
    }
  }

  // quadratic conjugate
  double worst_conj = 0.0;
  for (double h : {0.1, 0.5, 1.0, 4.0 / 3.0, 10.0})
    for (double x : {0.0, 0.001, 0.1, 0.7, 1.0, 3.0})
      worst_conj = std::max(worst_conj, std::abs(MarginFunction::power(h).conjugate(x) - x * x / (4 * h)));
  v.require(worst_conj <= 1e-10, "quadratic conjugate error " + g(worst_conj));

  // chained penalty bounds on random nested pairs
  std::size_t checked = 0, saturated_pairs = 0;
  double worst1 = -std::numeric_limits<double>::infinity();
  double worst2 = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t labels = 3 + seed % 4;
    const std::size_t big = std::min<std::size_t>(std::size_t{1} << labels, 4 + seed % 9);
    const auto pair = random_nested_pair(7000 + seed, labels, 1 + seed % 3, big);
    const std::size_t n = 50 + 25 * (seed % 19);
    ComplexityConfig cfg;
    cfg.t = 0.5 + double(seed % 5);
    cfg.mc_reps = 200;
    cfg.seed = seed;
    const ModelFamily fam({pair.small, pair.big}, true);
    bool sat = false;
    const double dbar = ideal_fixed_point_lower(pair.big, pair.dist, n, cfg, sat);
    if (sat) {
      ++saturated_pairs;
      continue;
    }
    ++checked;
    const double v_big = bernstein_radius(fam, 1, pair.dist, pair.fstar, cfg.t, n);
    const double v_small = bernstein_radius(fam, 0, pair.dist, pair.fstar, cfg.t, n);
    const auto& f_small = pair.small[population_minimizer(pair.small, pair.dist)];
    const double e_small = excess_risk(f_small, pair.dist, pair.fstar);
    const double rhs1 = 2 * dbar + std::sqrt(2.0) * v_small + 2 * e_small / (cfg.q * cfg.Kbar);
    worst1 = std::max(worst1, v_big - rhs1);
    v.require(v_big <= rhs1 + 1e-12, "first penalty bound, pair " + std::to_string(seed));

    const auto exact = fixed_point_ideal(pair.big, pair.dist, n, cfg);
    for (double sigma0 : {1e-3, 1e-2, 0.05, 0.1, 0.3, 1.0}) {
      const double d0 = diameter(pair.big, pair.dist, sigma0);
      const double lhs = std::max(exact.delta, sigma0 / (cfg.q * cfg.Kbar));
      const double rhs2 = d0 * std::sqrt(cfg.t / double(n));
      worst2 = std::max(worst2, rhs2 - lhs);
      v.require(exact.saturated || lhs >= rhs2 - 1e-12, "second penalty bound, pair " + std::to_string(seed));
    }
  }
  v.require(checked >= 150, "too many saturated pairs");
  v.detail << "penalty-bound pairs checked " << checked << " (saturated " << saturated_pairs << "), worst margins "
           << g(worst1) << " / " << g(worst2) << "; conjugate error " << g(worst_conj);
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Verdict&)> run;
};

} // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "exact counterexample construction", exact_counterexample},
      {2, "margin-gap sequence", margin_gap_sequence},
      {3, "binomial floor >= 0.1", binomial_floor},
      {4, "Bernstein coverage", bernstein_coverage},
      {5, "general-family oracle inequality", general_family_oracle},
      {6, "chain oracle inequality", chain_oracle},
      {7, "singleton selection failure", singleton_failure},
      {8, "conditioned replay invariance", conditioned_replay},
      {9, "property suites", property_suites},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s (%.2fs) %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                v.detail.str().c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
