#pragma once

#include <cstdint>
#include <vector>

#include "ascnet/segmenter/histogram.hpp"

namespace ascnet::segmenter {

struct Peak {
  int bin = 0;
  uint64_t count = 0;       // raw histogram count at the peak bin
  double prominence = 0.0;  // measured on the smoothed curve
};

// Bins ascending.
using PeakList = std::vector<Peak>;

struct PeakParams {
  int smooth_window = 5;                  // odd; centered moving average
  double min_prominence_fraction = 0.001; // of the histogram total
  int min_separation = 10;                // bins; keep the taller of close pairs
};

// Centered moving average (truncated at the edges), then strict local maxima
// (boundary bins qualify against their single inner neighbor), prominence
// filtering, and tallest-wins suppression of peaks closer than
// min_separation. Throws on an empty histogram.
PeakList detect_peaks(const Histogram256& h, const PeakParams& params);

// The smoothed curve used by detect_peaks, exposed for diagnostics/tests.
std::vector<double> smooth_histogram(const Histogram256& h, int window);

}  // namespace ascnet::segmenter
