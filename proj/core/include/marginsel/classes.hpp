#pragma once

// Model families built from explicit predictor enumerations.

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "marginsel/core.hpp"

namespace marginsel {

/// One model per listed function: F_m = {f_m}. Not nested.
struct SingletonsSpec {
  std::vector<LossFunction> functions;
};

/// F_m = {functions[0], ..., functions[m + first_size - 1]} for every m
/// such that the prefix fits. Nested.
struct PrefixNestedSpec {
  std::vector<LossFunction> functions;
  std::size_t first_size = 1;
};

/// Threshold predictors u_j(x) = 1{x < j} on an ordered grid of
/// `grid_size` labels. The model at depth d (1 <= d <= grid_size) holds
/// u_0, ..., u_d, so it has d + 1 members. Nested.
struct ThresholdsSpec {
  std::size_t grid_size = 0;
};

/// Predictors constant on the cells of the dyadic partition of
/// X = {0, ..., 2^max_depth - 1}; depth d has 2^d cells and 2^(2^d)
/// predictors. Depths 0..max_depth, nested. max_depth <= 3.
struct DyadicHistogramsSpec {
  std::size_t max_depth = 0;
};

using PredictorClassSpec = std::variant<SingletonsSpec, PrefixNestedSpec, ThresholdsSpec, DyadicHistogramsSpec>;

/// Materializes each predictor as its 0-1 loss. Threshold and histogram
/// kinds need the label count of the target domain: `num_labels` must
/// equal grid_size (thresholds) or 2^max_depth (histograms).
ModelFamily build_family(const PredictorClassSpec& spec, std::size_t num_labels);

/// Id of a 0-1 predictor on at most 62 labels: its bit pattern.
FunctionId predictor_id(std::span<const std::uint8_t> predictor);

/// Model of explicit predictors with bit-pattern ids.
Model model_from_predictors(std::string name, const std::vector<std::vector<std::uint8_t>>& predictors);

} // namespace marginsel
