#include "marginsel/json_io.hpp"

#include <stdexcept>

namespace marginsel {

using nlohmann::json;

void to_json(json& j, const DiscreteDistribution& dist) {
  j = json{{"num_labels", dist.num_labels()}, {"atom_order", "2x+y"}};
  auto& masses = j["masses"] = json::array();
  for (double m : dist.masses()) masses.push_back(m);
}

void to_json(json& j, const LossFunction& f) {
  j = json{{"id", f.id()}, {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

void to_json(json& j, const Model& model) {
  j = json{{"name", model.name()}, {"functions", json::array()}};
  for (const auto& f : model.functions()) j["functions"].push_back(f);
}

void to_json(json& j, const ModelFamily& family) {
  j = json{{"nested", family.nested()}, {"models", json::array()}};
  for (const auto& m : family.models()) j["models"].push_back(m);
}

void to_json(json& j, const CounterexampleInstance& inst) {
  j = json{{"instance", "counterexample"},
           {"n", inst.n},
           {"alpha", inst.alpha},
           {"h", inst.h},
           {"p0", inst.p0},
           {"p1", inst.p1},
           {"f0", inst.f0},
           {"f1", inst.f1},
           {"fstar0", inst.fstar0},
           {"fstar1", inst.fstar1}};
}

void to_json(json& j, const MarginGapInstance& inst) {
  j = json{{"instance", "margin-gap"}, {"kappa", inst.kappa}, {"lambda", inst.lambda}, {"depth", inst.depth},
           {"p", inst.p},              {"q", inst.q},         {"delta", inst.delta},   {"dist", inst.dist},
           {"fstar", inst.fstar},      {"functions", json::array()}};
  for (const auto& f : inst.fs) j["functions"].push_back(f);
}

void to_json(json& j, const GeneralInstance& inst) {
  j = json{{"instance", "general"}, {"dist", inst.dist}, {"fstar", inst.fstar}, {"predictors", json::array()}};
  for (const auto& u : inst.predictors) {
    j["predictors"].push_back(std::vector<int>(u.begin(), u.end()));
  }
}

void to_json(json& j, const ComplexityReport& report) {
  j = json{{"kind", report.kind == ComplexityKind::ideal ? "ideal" : "empirical"},
           {"delta", report.delta},
           {"saturated", report.saturated},
           {"threshold", report.threshold},
           {"modulus_std_error", report.modulus_std_error},
           {"certificate", json::array()}};
  for (const auto& pt : report.certificate) {
    j["certificate"].push_back(json{{"sigma", pt.sigma}, {"ratio", pt.ratio}, {"suffix_sup", pt.suffix_sup}});
  }
}

void to_json(json& j, const SelectionOutcome& outcome) {
  j = json{{"chosen", outcome.chosen}, {"excess", outcome.excess}, {"per_model", json::array()}};
  for (const auto& row : outcome.per_model) {
    j["per_model"].push_back(json{{"erm_index", row.erm_index},
                                  {"erm_id", row.erm_id},
                                  {"empirical_risk", row.empirical_risk},
                                  {"penalty", row.penalty},
                                  {"criterion", row.criterion}});
  }
}

void to_json(json& j, const FloorReport& report) {
  j = json{{"n", report.n},
           {"min_value", report.min_value},
           {"argmin", {{"k", report.argmin.k}, {"p", report.argmin.p}}},
           {"points", report.grid.size()}};
}

DiscreteDistribution distribution_from_json(const json& j) {
  return DiscreteDistribution(j.at("num_labels").get<std::size_t>(), j.at("masses").get<std::vector<double>>());
}

LossFunction loss_from_json(const json& j) {
  return LossFunction(j.at("id").get<FunctionId>(), j.at("values").get<std::vector<double>>());
}

Model model_from_json(const json& j) {
  std::vector<LossFunction> fs;
  for (const auto& f : j.at("functions")) fs.push_back(loss_from_json(f));
  return Model(j.at("name").get<std::string>(), std::move(fs));
}

ModelFamily family_from_json(const json& j) {
  std::vector<Model> models;
  for (const auto& m : j.at("models")) models.push_back(model_from_json(m));
  return ModelFamily(std::move(models), j.at("nested").get<bool>());
}

json summary_json(const CounterexampleSummary& summary) {
  json j{{"schema", kSummarySchema}, {"experiment", "counterexample"}, {"truth", summary.truth}};
  auto& blocks = j["blocks"] = json::array();
  for (const auto& b : summary.blocks) {
    blocks.push_back(json{{"n", b.n},
                          {"alpha", b.alpha},
                          {"h", b.h},
                          {"benchmark", b.benchmark},
                          {"threshold_factor", b.threshold_factor},
                          {"threshold", b.threshold},
                          {"excess_f0", b.excess_f0},
                          {"excess_f1", b.excess_f1},
                          {"failures", b.failures},
                          {"p_hat", b.p_hat},
                          {"std_error", b.std_error},
                          {"mean_excess", b.mean_excess},
                          {"mean_excess_over_benchmark", b.mean_excess_over_benchmark},
                          {"chose_model_1", b.chose_one}});
  }
  return j;
}

json summary_json(const NestedSummary& summary) {
  json j{{"schema", kSummarySchema}, {"experiment", "nested"}, {"passed", summary.passed()}};
  auto& blocks = j["blocks"] = json::array();
  for (const auto& b : summary.blocks) {
    blocks.push_back(json{{"family", b.family},
                          {"n", b.n},
                          {"t", b.t},
                          {"replicates", b.replicates},
                          {"assumptions_ok", b.assumptions_ok},
                          {"assumption_fraction", b.assumption_fraction},
                          {"conclusion_holds", b.conclusion_holds},
                          {"conclusion_fraction", b.conclusion_fraction},
                          {"pen_minor_ok", b.pen_minor_ok},
                          {"min_pen_ok", b.min_pen_ok},
                          {"bernstein_ok", b.bernstein_ok},
                          {"excess_quantiles",
                           {{"q50", b.excess_quantiles.at(0)},
                            {"q90", b.excess_quantiles.at(1)},
                            {"q99", b.excess_quantiles.at(2)},
                            {"max", b.excess_quantiles.at(3)}}},
                          {"oracle_excess", b.oracle_excess},
                          {"model_excess", b.model_excess},
                          {"margin_h", b.margin_h},
                          {"delta_bar", b.delta_bar},
                          {"saturated_replicates", b.saturated_replicates},
                          {"delta_hat_ge_bar", b.delta_hat_ge_bar}});
  }
  return j;
}

json summary_json(const CoverageSummary& summary) {
  json j{{"schema", kSummarySchema},
         {"experiment", "coverage"},
         {"family", summary.family},
         {"replicates", summary.replicates},
         {"passed", summary.passed()}};
  auto& blocks = j["blocks"] = json::array();
  for (const auto& b : summary.blocks) {
    blocks.push_back(json{{"n", b.n}, {"t", b.t}, {"coverage", b.coverage}, {"required", b.required},
                          {"passed", b.passed}});
  }
  return j;
}

json summary_json(const MarginGapSummary& summary) {
  json j{{"schema", kSummarySchema},
         {"experiment", "margin-gap"},
         {"kappa", summary.kappa},
         {"ratio_decreasing", summary.ratio_decreasing},
         {"passed", summary.passed()}};
  auto& blocks = j["blocks"] = json::array();
  for (const auto& b : summary.blocks) {
    blocks.push_back(json{{"n", b.n},
                          {"num_functions", b.num_functions},
                          {"local_benchmark", b.local_benchmark},
                          {"argmin_index", b.argmin_index},
                          {"argmin_excess", b.argmin_excess},
                          {"bound", b.bound},
                          {"global_shape", b.global_shape},
                          {"ratio", b.ratio},
                          {"within_bound", b.within_bound}});
  }
  return j;
}

json summary_json(const BinomialFloorSummary& summary) {
  json j{{"schema", kSummarySchema}, {"experiment", "binomial-floor"}, {"a", summary.a},
         {"b", summary.b},           {"c", summary.c},                   {"exact", summary.exact}};
  j["floors"] = json::array();
  for (const auto& f : summary.floors) j["floors"].push_back(f);
  return j;
}

} // namespace marginsel
