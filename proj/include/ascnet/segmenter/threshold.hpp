#pragma once

#include <optional>

#include "ascnet/datapipe/slice.hpp"
#include "ascnet/segmenter/peaks.hpp"

namespace ascnet::segmenter {

enum class Polarity { bright, dark };

struct ThresholdRule {
  Polarity polarity = Polarity::bright;
  std::optional<int> threshold_override;  // 0-255; wins over peak selection
  bool roi_required = false;
};

// bright: bin of the last (rightmost) peak; dark: bin of the first peak.
// The override wins when present. Throws a no-threshold error on an empty
// peak list without an override.
int select_threshold(const PeakList& peaks, const ThresholdRule& rule);

// bright: mask = round(v*255) >= t. dark: zero pixels outside the roi,
// invert (v -> 1-v), then apply the bright rule. A provided roi always
// intersects the final mask; roi_required additionally makes it mandatory.
datapipe::Mask apply_threshold(const datapipe::Slice& i_ro, int t, const ThresholdRule& rule,
                               const datapipe::Mask* roi = nullptr);

}  // namespace ascnet::segmenter
