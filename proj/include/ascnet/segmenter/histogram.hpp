#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ascnet/datapipe/slice.hpp"

namespace ascnet::segmenter {

// 256-bin intensity histogram on the 0-255 scale; bin(v) = round(v * 255).
struct Histogram256 {
  std::array<uint64_t, 256> counts{};
  uint64_t total = 0;

  void add(int bin, uint64_t count = 1) {
    counts[static_cast<size_t>(bin)] += count;
    total += count;
  }

  void merge(const Histogram256& other) {
    for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    total += other.total;
  }
};

// Pooled histogram over all slices. When roi is given it must match the
// slices in count and shape; only roi==1 pixels contribute. invert flips
// intensities (v -> 1-v) before binning, the dark-lesion recipe.
Histogram256 compute_histogram(const std::vector<datapipe::Slice>& slices,
                               const std::vector<datapipe::Mask>* roi = nullptr,
                               bool invert = false);

// 256 rows of "bin,count".
void write_histogram_csv(const std::string& path, const Histogram256& h);

}  // namespace ascnet::segmenter
