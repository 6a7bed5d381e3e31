#include "ascnet/datapipe/balance.hpp"

#include "ascnet/core/error.hpp"
#include "ascnet/core/rng.hpp"

namespace ascnet::datapipe {

namespace {

void pad_with_duplicates(std::vector<Slice>& set, size_t target, Rng& rng) {
  size_t original = set.size();
  set.reserve(target);
  while (set.size() < target) {
    set.push_back(set[rng.below(original)]);
  }
}

}  // namespace

std::pair<std::vector<Slice>, ReferenceSet> balance_sets(std::vector<Slice> inputs,
                                                         ReferenceSet reference,
                                                         uint64_t seed) {
  if (inputs.empty()) throw config_error("balance_sets: input set is empty");
  if (reference.slices.empty()) throw config_error("balance_sets: reference set is empty");

  size_t target = std::max(inputs.size(), reference.slices.size());
  Rng rng(mix_seed(seed, 0xba1aceULL));
  if (inputs.size() < target) {
    pad_with_duplicates(inputs, target, rng);
  } else if (reference.slices.size() < target) {
    pad_with_duplicates(reference.slices, target, rng);
  }
  return {std::move(inputs), std::move(reference)};
}

}  // namespace ascnet::datapipe
