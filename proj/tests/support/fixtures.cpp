#include "fixtures.hpp"

#include <set>
#include <stdexcept>

#include "marginsel/classes.hpp"
#include "marginsel/distributions.hpp"

namespace marginsel::testing {

NestedPair random_nested_pair(std::uint64_t seed, std::size_t num_labels, std::size_t small_size,
                              std::size_t big_size) {
  if (small_size == 0 || small_size > big_size || big_size > (std::size_t{1} << num_labels)) {
    throw std::invalid_argument("random_nested_pair: bad sizes");
  }
  auto dist = random_distribution(num_labels, seed);
  auto fstar = bayes_loss(dist);
  std::vector<std::vector<std::uint8_t>> predictors;
  std::set<FunctionId> seen;
  for (std::uint64_t i = 0; predictors.size() < big_size; ++i) {
    auto u = random_predictor(num_labels, derive_seed(seed, i));
    if (seen.insert(predictor_id(u)).second) predictors.push_back(std::move(u));
  }
  std::vector<std::vector<std::uint8_t>> head(predictors.begin(), predictors.begin() + small_size);
  return NestedPair{std::move(dist), std::move(fstar), model_from_predictors("small", head),
                    model_from_predictors("big", predictors)};
}

} // namespace marginsel::testing
