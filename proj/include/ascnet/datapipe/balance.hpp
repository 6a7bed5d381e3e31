#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ascnet/datapipe/slice.hpp"

namespace ascnet::datapipe {

// Reference distribution R_d: the user-curated normal set.
struct ReferenceSet {
  std::vector<Slice> slices;
};

// Equalizes set sizes by duplicating uniformly sampled members of the
// smaller set (seeded). The larger side passes through unchanged; original
// members are always preserved.
std::pair<std::vector<Slice>, ReferenceSet> balance_sets(std::vector<Slice> inputs,
                                                         ReferenceSet reference,
                                                         uint64_t seed);

}  // namespace ascnet::datapipe
