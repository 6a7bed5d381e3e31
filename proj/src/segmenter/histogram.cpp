#include "ascnet/segmenter/histogram.hpp"

#include <fstream>

#include "ascnet/core/error.hpp"

namespace ascnet::segmenter {

Histogram256 compute_histogram(const std::vector<datapipe::Slice>& slices,
                               const std::vector<datapipe::Mask>* roi, bool invert) {
  if (roi != nullptr && roi->size() != slices.size()) {
    throw config_error("compute_histogram: roi count does not match slice count");
  }
  Histogram256 h;
  for (size_t i = 0; i < slices.size(); ++i) {
    const datapipe::Slice& s = slices[i];
    const datapipe::Mask* m = roi != nullptr ? &(*roi)[i] : nullptr;
    if (m != nullptr && (m->height != s.height || m->width != s.width)) {
      throw config_error("compute_histogram: roi shape mismatch at slice " + std::to_string(i));
    }
    for (size_t p = 0; p < s.pixels.size(); ++p) {
      if (m != nullptr && m->pixels[p] == 0) continue;
      double v = invert ? 1.0 - s.pixels[p] : s.pixels[p];
      h.add(datapipe::intensity_bin(v));
    }
  }
  return h;
}

void write_histogram_csv(const std::string& path, const Histogram256& h) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write histogram csv: " + path);
  for (int b = 0; b < 256; ++b) {
    out << b << "," << h.counts[static_cast<size_t>(b)] << "\n";
  }
}

}  // namespace ascnet::segmenter
