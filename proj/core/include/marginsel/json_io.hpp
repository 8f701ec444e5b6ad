#pragma once

// JSON documents for instances, families, complexity certificates and
// experiment summaries. Summaries carry "schema": 1.

#include <nlohmann/json.hpp>

#include "marginsel/complexity.hpp"
#include "marginsel/core.hpp"
#include "marginsel/distributions.hpp"
#include "marginsel/harness.hpp"
#include "marginsel/selection.hpp"

namespace marginsel {

inline constexpr int kSummarySchema = 1;

void to_json(nlohmann::json& j, const DiscreteDistribution& dist);
void to_json(nlohmann::json& j, const LossFunction& f);
void to_json(nlohmann::json& j, const Model& model);
void to_json(nlohmann::json& j, const ModelFamily& family);
void to_json(nlohmann::json& j, const CounterexampleInstance& inst);
void to_json(nlohmann::json& j, const MarginGapInstance& inst);
void to_json(nlohmann::json& j, const GeneralInstance& inst);
void to_json(nlohmann::json& j, const ComplexityReport& report);
void to_json(nlohmann::json& j, const SelectionOutcome& outcome);
void to_json(nlohmann::json& j, const FloorReport& report);

/// Inverses of the writers above; throw nlohmann::json::exception or
/// std::invalid_argument on malformed input.
DiscreteDistribution distribution_from_json(const nlohmann::json& j);
LossFunction loss_from_json(const nlohmann::json& j);
Model model_from_json(const nlohmann::json& j);
ModelFamily family_from_json(const nlohmann::json& j);

nlohmann::json summary_json(const CounterexampleSummary& summary);
nlohmann::json summary_json(const NestedSummary& summary);
nlohmann::json summary_json(const CoverageSummary& summary);
nlohmann::json summary_json(const MarginGapSummary& summary);
nlohmann::json summary_json(const BinomialFloorSummary& summary);

} // namespace marginsel
