#include "marginsel/classes.hpp"

#include <stdexcept>
#include <string>

namespace marginsel {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ModelFamily build_singletons(const SingletonsSpec& spec) {
  std::vector<Model> models;
  models.reserve(spec.functions.size());
  for (const auto& f : spec.functions) {
    models.emplace_back("singleton_" + std::to_string(f.id()), std::vector<LossFunction>{f});
  }
  return ModelFamily(std::move(models), false);
}

ModelFamily build_prefix_nested(const PrefixNestedSpec& spec) {
  if (spec.first_size == 0 || spec.first_size > spec.functions.size()) {
    throw std::invalid_argument("prefix_nested: first_size out of range");
  }
  std::vector<Model> models;
  for (std::size_t len = spec.first_size; len <= spec.functions.size(); ++len) {
    std::vector<LossFunction> members(spec.functions.begin(), spec.functions.begin() + static_cast<long>(len));
    models.emplace_back("prefix_" + std::to_string(len), std::move(members));
  }
  return ModelFamily(std::move(models), true);
}

ModelFamily build_thresholds(const ThresholdsSpec& spec, std::size_t num_labels) {
  if (spec.grid_size == 0 || spec.grid_size != num_labels) {
    throw std::invalid_argument("thresholds: grid size must match the ordered label set");
  }
  std::vector<LossFunction> all;
  for (std::size_t j = 0; j <= spec.grid_size; ++j) {
    std::vector<std::uint8_t> u(spec.grid_size);
    for (std::size_t x = 0; x < spec.grid_size; ++x) u[x] = x < j ? 1 : 0;
    all.push_back(LossFunction::zero_one(static_cast<FunctionId>(j), u));
  }
  std::vector<Model> models;
  for (std::size_t d = 1; d <= spec.grid_size; ++d) {
    models.emplace_back("threshold_depth_" + std::to_string(d),
                        std::vector<LossFunction>(all.begin(), all.begin() + static_cast<long>(d + 1)));
  }
  return ModelFamily(std::move(models), true);
}

ModelFamily build_histograms(const DyadicHistogramsSpec& spec, std::size_t num_labels) {
  if (spec.max_depth > 3) throw std::invalid_argument("dyadic_histograms: max_depth must be <= 3");
  const std::size_t size = std::size_t{1} << spec.max_depth;
  if (num_labels != size) throw std::invalid_argument("dyadic_histograms: label count must be 2^max_depth");

  std::vector<Model> models;
  std::vector<LossFunction> members;
  for (std::size_t d = 0; d <= spec.max_depth; ++d) {
    const std::size_t cells = std::size_t{1} << d;
    const std::size_t width = size / cells;
    const std::size_t patterns = std::size_t{1} << cells;
    for (std::size_t pattern = 0; pattern < patterns; ++pattern) {
      std::vector<std::uint8_t> u(size);
      for (std::size_t x = 0; x < size; ++x) u[x] = (pattern >> (x / width)) & 1U;
      const FunctionId id = predictor_id(u);
      bool seen = false;
      for (const auto& f : members) seen = seen || f.id() == id;
      if (!seen) members.push_back(LossFunction::zero_one(id, u));
    }
    models.emplace_back("histogram_depth_" + std::to_string(d), members);
  }
  return ModelFamily(std::move(models), true);
}

} // namespace

FunctionId predictor_id(std::span<const std::uint8_t> predictor) {
  if (predictor.size() > 62) throw std::invalid_argument("predictor_id: more than 62 labels");
  FunctionId id = 0;
  for (std::size_t x = 0; x < predictor.size(); ++x) {
    if (predictor[x] != 0) id |= FunctionId{1} << x;
  }
  return id;
}

Model model_from_predictors(std::string name, const std::vector<std::vector<std::uint8_t>>& predictors) {
  std::vector<LossFunction> members;
  members.reserve(predictors.size());
  for (const auto& u : predictors) members.push_back(LossFunction::zero_one(predictor_id(u), u));
  return Model(std::move(name), std::move(members));
}

ModelFamily build_family(const PredictorClassSpec& spec, std::size_t num_labels) {
  return std::visit(Overloaded{
                        [](const SingletonsSpec& s) { return build_singletons(s); },
                        [](const PrefixNestedSpec& s) { return build_prefix_nested(s); },
                        [num_labels](const ThresholdsSpec& s) { return build_thresholds(s, num_labels); },
                        [num_labels](const DyadicHistogramsSpec& s) { return build_histograms(s, num_labels); },
                    },
                    spec);
}

} // namespace marginsel
