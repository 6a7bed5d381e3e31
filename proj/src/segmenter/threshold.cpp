#include "ascnet/segmenter/threshold.hpp"

#include "ascnet/core/error.hpp"

namespace ascnet::segmenter {

int select_threshold(const PeakList& peaks, const ThresholdRule& rule) {
  if (rule.threshold_override.has_value()) {
    int t = *rule.threshold_override;
    if (t < 0 || t > 255) throw config_error("threshold override must be in 0-255");
    return t;
  }
  if (peaks.empty()) {
    throw data_error("no histogram peaks found and no threshold override given");
  }
  return rule.polarity == Polarity::bright ? peaks.back().bin : peaks.front().bin;
}

datapipe::Mask apply_threshold(const datapipe::Slice& i_ro, int t, const ThresholdRule& rule,
                               const datapipe::Mask* roi) {
  if (t < 0 || t > 255) throw config_error("threshold must be in 0-255");
  if (rule.roi_required && roi == nullptr) {
    throw config_error("threshold rule requires an ROI mask but none was given");
  }
  if (roi != nullptr && (roi->height != i_ro.height || roi->width != i_ro.width)) {
    throw config_error("apply_threshold: roi shape mismatch");
  }

  datapipe::Mask out;
  out.height = i_ro.height;
  out.width = i_ro.width;
  out.pixels.assign(i_ro.pixels.size(), 0);

  for (size_t p = 0; p < i_ro.pixels.size(); ++p) {
    double v = i_ro.pixels[p];
    if (rule.polarity == Polarity::dark) {
      if (roi != nullptr && roi->pixels[p] == 0) v = 0.0;
      v = 1.0 - v;
    }
    out.pixels[p] = datapipe::intensity_bin(v) >= t ? 1 : 0;
  }
  if (roi != nullptr) {
    for (size_t p = 0; p < out.pixels.size(); ++p) {
      if (roi->pixels[p] == 0) out.pixels[p] = 0;
    }
  }
  return out;
}

}  // namespace ascnet::segmenter
