// marginsel: run the selection experiments and write CSV / JSON results.
//
// Exit codes: 0 success, 1 usage or runtime error, 2 when an experiment's
// built-in check fails (an oracle inequality violated on an
// assumption-satisfying replicate, coverage below its floor, or the
// margin-gap bound).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marginsel/harness.hpp"
#include "marginsel/json_io.hpp"

namespace fs = std::filesystem;
using namespace marginsel;

namespace {

struct Output {
  fs::path dir;
  std::string format = "both";
  std::string export_path;
  bool quiet = false;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void emit(const Output& out, const std::string& name, const std::string& csv, const nlohmann::json& summary) {
  if (out.format == "csv" || out.format == "both") write_text(out.dir / (name + ".csv"), csv);
  if (out.format == "json" || out.format == "both") write_text(out.dir / (name + ".json"), summary.dump(2) + "\n");
}

void export_json(const Output& out, const nlohmann::json& doc) {
  if (!out.export_path.empty()) write_text(out.export_path, doc.dump(2) + "\n");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// "auto", a number, or "ln:<x>" for ln(x).
double parse_t(const std::string& text) {
  if (text.rfind("ln:", 0) == 0) return std::log(std::stod(text.substr(3)));
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("cannot parse t '" + text + "'");
  return v;
}

int run_counterexample_cmd(const ExperimentConfig& cfg, const Output& out) {
  const auto summary = run_counterexample(cfg);
  export_json(out, nlohmann::json(build_counterexample(cfg.n_list.front())));
  emit(out, "counterexample", to_csv(summary), summary_json(summary));
  if (!out.quiet) {
    for (const auto& b : summary.blocks) {
      std::cout << "[counterexample n=" << b.n << " truth=P" << summary.truth << "]\n"
                << "  benchmark           " << fmt(b.benchmark) << "\n"
                << "  threshold factor    " << fmt(b.threshold_factor) << "\n"
                << "  excess of f0 / f1   " << fmt(b.excess_f0) << " / " << fmt(b.excess_f1) << "\n"
                << "  failure probability " << fmt(b.p_hat) << " +- " << fmt(b.std_error) << " (" << b.failures
                << "/" << cfg.replicates << ")\n"
                << "  E[excess]/benchmark " << fmt(b.mean_excess_over_benchmark) << "\n";
    }
  }
  return 0;
}

int run_nested_cmd(const ExperimentConfig& cfg, const Output& out) {
  const auto summary = run_nested(cfg);
  if (cfg.family == "odd-chain") {
    const auto n = cfg.n_list.front();
    const auto inst = chain_instance(cfg.kappa, cfg.num_models, n);
    export_json(out, nlohmann::json{{"instance", inst}, {"family", odd_chain(inst, cfg.num_models)}, {"n", n}});
  } else {
    const auto inst = build_general_instance();
    export_json(out, nlohmann::json{{"instance", inst}, {"family", general_family(inst)}});
  }
  emit(out, "nested", to_csv(summary), summary_json(summary));
  if (!out.quiet) {
    for (const auto& b : summary.blocks) {
      std::cout << "[nested family=" << b.family << " n=" << b.n << " t=" << fmt(b.t) << "]\n"
                << "  assumptions satisfied " << b.assumptions_ok << "/" << b.replicates << " ("
                << fmt(b.assumption_fraction) << ")\n"
                << "  conclusion holds      " << b.conclusion_holds << "/" << b.assumptions_ok << "\n"
                << "  excess q50/q90/max    " << fmt(b.excess_quantiles[0]) << " / " << fmt(b.excess_quantiles[1])
                << " / " << fmt(b.excess_quantiles[3]) << "\n"
                << "  oracle excess         " << fmt(b.oracle_excess) << "\n";
      if (b.saturated_replicates > 0) {
        std::cout << "  warning: " << b.saturated_replicates << " replicates hit the grid maximum\n";
      }
    }
  }
  return summary.passed() ? 0 : 2;
}

int run_coverage_cmd(const ExperimentConfig& cfg, const Output& out) {
  const auto summary = run_coverage(cfg);
  emit(out, "coverage", to_csv(summary), summary_json(summary));
  if (!out.quiet) {
    for (const auto& b : summary.blocks) {
      std::cout << "[coverage n=" << b.n << " t=" << fmt(b.t) << "] required " << fmt(b.required) << ":";
      for (double c : b.coverage) std::cout << ' ' << fmt(c);
      std::cout << (b.passed ? "  ok\n" : "  BELOW\n");
    }
  }
  return summary.passed() ? 0 : 2;
}

int run_margin_gap_cmd(const ExperimentConfig& cfg, const Output& out) {
  const auto summary = run_margin_gap(cfg);
  emit(out, "margin-gap", to_csv(summary), summary_json(summary));
  if (!out.quiet) {
    for (const auto& b : summary.blocks) {
      std::cout << "[margin-gap n=" << b.n << "] local " << fmt(b.local_benchmark) << " <= " << fmt(b.bound)
                << (b.within_bound ? "" : " VIOLATED") << ", global shape " << fmt(b.global_shape) << ", ratio "
                << fmt(b.ratio) << "\n";
    }
    std::cout << "ratio decreasing over n: " << (summary.ratio_decreasing ? "yes" : "no") << "\n";
  }
  return summary.passed() ? 0 : 2;
}

int run_binomial_floor_cmd(const ExperimentConfig& cfg, const Output& out) {
  const auto summary = run_binomial_floor(cfg);
  emit(out, "binomial-floor", to_csv(summary), summary_json(summary));
  if (!out.quiet) {
    for (const auto& f : summary.floors) {
      std::cout << "[binomial-floor n=" << f.n << "] floor " << fmt(f.min_value) << " at k=" << f.argmin.k
                << " p=" << fmt(f.argmin.p) << "\n";
    }
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized model selection experiments under margin conditions"};
  app.require_subcommand(1);
  app.footer("\nOutput goes to --out-dir (default $MARGINSEL_OUT_DIR, else the working directory) as\n"
             "<experiment>.csv and <experiment>.json (JSON summaries carry \"schema\": 1).\n\n" +
             csv_schema() +
             "\nExit codes: 0 success, 1 usage or runtime error, 2 built-in check failed.");

  ExperimentConfig cfg;
  Output out;
  std::string out_dir;
  std::string t_text = "auto";
  std::vector<std::string> t_list_text;
  std::string rule_kind = "erm";
  std::string rule_output = "index";
  bool dense = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--reps,--replicates", cfg.replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Base seed");
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    sub->add_option("--out-dir", out_dir, "Output directory");
    sub->add_option("--format", out.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--export", out.export_path, "Write the problem instance as JSON to this path");
    sub->add_flag("--quiet", out.quiet, "No summary on stdout");
  };

  auto* counter = app.add_subcommand("counterexample", "Two singletons where no rule adapts to the margin");
  common(counter);
  counter->add_option("--n", cfg.n_list, "Sample sizes")->delimiter(',')->required();
  counter->add_option("--truth", cfg.truth, "Generating distribution P_0 or P_1")->check(CLI::IsMember({0, 1}));
  counter->add_option("--c4", cfg.C4, "Threshold constant: failure when excess >= C4 sqrt(n)/ln(n) x benchmark");
  counter->add_option("--rule", rule_kind, "erm, constant, randomized or external")
      ->check(CLI::IsMember({"erm", "constant", "randomized", "external"}));
  counter->add_option("--constant-model", cfg.rule.constant_model, "Model picked by the constant rule");
  counter->add_option("--probability", cfg.rule.probability, "P(select model 1) for the randomized rule");
  counter->add_option("--command", cfg.rule.command,
                      "External rule: shell command reading JSON lines {\"x\":..,\"y\":..} on stdin");
  counter->add_option("--rule-output", rule_output, "External rule prints a model index or a probability")
      ->check(CLI::IsMember({"index", "probability"}));

  auto* nested = app.add_subcommand("nested", "Oracle inequality checks on a chain or a non-nested family");
  common(nested);
  nested->add_option("--n", cfg.n_list, "Sample sizes")->delimiter(',')->required();
  nested->add_option("--family", cfg.family, "odd-chain or general")->check(CLI::IsMember({"odd-chain", "general"}));
  nested->add_option("--kappa", cfg.kappa, "Margin exponent of the chain instance");
  nested->add_option("--models", cfg.num_models, "Number of models in the chain");
  nested->add_option("--t", t_text, "Confidence level: auto (ln|M| + 3 ln n), a number, or ln:<x>");
  nested->add_option("--pen-scale", cfg.pen_scale, "pen = scale x local Rademacher fixed point");
  nested->add_option("--c", cfg.c, "Constant c of the penalty conditions (chain)");
  nested->add_option("--general-c", cfg.general_c, "Constant c for the general family");
  nested->add_option("--kbar", cfg.complexity.Kbar, "Kbar");
  nested->add_option("--q", cfg.complexity.q, "q");
  nested->add_option("--khat", cfg.complexity.Khat, "Khat");
  nested->add_option("--chat", cfg.complexity.chat, "chat");
  nested->add_option("--mc-reps", cfg.complexity.mc_reps, "Monte Carlo reps for the ideal modulus");
  nested->add_option("--eps-grid", cfg.eps_grid, "eps values for the oracle inequality")->delimiter(',');

  auto* coverage = app.add_subcommand("coverage", "Bernstein event frequency per model");
  common(coverage);
  coverage->add_option("--n", cfg.n_list, "Sample sizes")->delimiter(',')->required();
  coverage->add_option("--t", t_list_text, "Confidence levels (numbers or ln:<x>)")->delimiter(',')->required();
  coverage->add_option("--family", cfg.family, "fair-coin or general")->check(CLI::IsMember({"fair-coin", "general"}));

  auto* gap = app.add_subcommand("margin-gap", "Local versus global margin benchmarks");
  common(gap);
  gap->add_option("--n", cfg.n_list, "Sample sizes")->delimiter(',')->required();
  gap->add_option("--kappa", cfg.kappa, "Margin exponent");

  auto* floor = app.add_subcommand("binomial-floor", "Scan sqrt(n) x binomial pmf over a central window");
  common(floor);
  floor->add_option("--n-list,--n", cfg.n_list, "Sample sizes")->delimiter(',')->required();
  floor->add_option("--a", cfg.a, "k window: |k - n/2| <= a sqrt(n)");
  floor->add_option("--b", cfg.b, "p window: |p - 1/2| <= min(b / sqrt(n), c)");
  floor->add_option("--c", cfg.floor_c, "p window cap");
  floor->add_flag("--dense", dense, "Scan a 201-point p grid instead of the exact candidate set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    out.dir = out_dir.empty() ? default_output_dir() : fs::path(out_dir);
    if (counter->parsed()) {
      cfg.experiment = ExperimentKind::counterexample;
      if (rule_kind == "constant") cfg.rule.kind = RuleSpec::Kind::constant;
      if (rule_kind == "randomized") cfg.rule.kind = RuleSpec::Kind::randomized;
      if (rule_kind == "external") cfg.rule.kind = RuleSpec::Kind::external;
      cfg.rule.external_output =
          rule_output == "probability" ? ExternalRule::Output::probability : ExternalRule::Output::model_index;
      cfg.validate();
      return run_counterexample_cmd(cfg, out);
    }
    if (nested->parsed()) {
      cfg.experiment = ExperimentKind::nested;
      if (t_text != "auto") cfg.t = parse_t(t_text);
      cfg.validate();
      return run_nested_cmd(cfg, out);
    }
    if (coverage->parsed()) {
      cfg.experiment = ExperimentKind::coverage;
      if (coverage->count("--family") == 0) cfg.family = "fair-coin";
      for (const auto& s : t_list_text) cfg.t_list.push_back(parse_t(s));
      cfg.validate();
      return run_coverage_cmd(cfg, out);
    }
    if (gap->parsed()) {
      cfg.experiment = ExperimentKind::margin_gap;
      cfg.validate();
      return run_margin_gap_cmd(cfg, out);
    }
    cfg.experiment = ExperimentKind::binomial_floor;
    cfg.exact = !dense;
    cfg.validate();
    return run_binomial_floor_cmd(cfg, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "marginsel: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "marginsel: " << e.what() << "\n";
    return 1;
  }
}
