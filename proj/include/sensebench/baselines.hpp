#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "sensebench/dataset.hpp"
#include "sensebench/detail/rng.hpp"
#include "sensebench/errors.hpp"
#include "sensebench/sense_id.hpp"

namespace sensebench {

/// A disambiguator's choice for one instance. `chosen` is always one of the
/// instance's candidates; `scores` is populated only by systems that rank.
struct Prediction {
  SenseId chosen;
  std::map<SenseId, double> scores;
  std::string method;
};

/// Uniform draw from the candidate set, reproducible from the seed.
inline Prediction random_choice(const Instance& instance, std::uint64_t seed) {
  if (instance.candidates.empty()) throw DatasetError("instance '" + instance.id + "' has no candidates");
  const std::vector<SenseId> candidates = instance.sorted_candidates();
  detail::SplitMix64 rng(seed);
  const std::size_t idx = static_cast<std::size_t>(rng.below(candidates.size()));
  return {candidates[idx], {}, "random"};
}

/// The candidate minimal under (lemma, sense_no) order. Low sense numbers
/// loosely track frequency in the lexicon, so this approximates a
/// most-frequent-sense baseline.
inline Prediction first_sense(const Instance& instance) {
  if (instance.candidates.empty()) throw DatasetError("instance '" + instance.id + "' has no candidates");
  const SenseId& best =
      *std::min_element(instance.candidates.begin(), instance.candidates.end());
  return {best, {}, "first-sense"};
}

/// The gold sense when the candidate list contains it, otherwise nothing
/// (scored as incorrect). Measures the ceiling imposed by candidate-list
/// gaps from the upstream lemmatizer.
inline std::optional<Prediction> oracle_upper_bound(const Instance& instance) {
  const auto it = std::find(instance.candidates.begin(), instance.candidates.end(),
                            instance.gold);
  if (it == instance.candidates.end()) return std::nullopt;
  return Prediction{instance.gold, {}, "upper-bound"};
}

/// Per-instance seed for a run-level seed, stable across platforms and
/// independent of evaluation order.
inline std::uint64_t instance_seed(std::uint64_t run_seed, const std::string& instance_id) {
  return detail::SplitMix64(run_seed ^ detail::fnv1a64(instance_id)).next();
}

}  // namespace sensebench
