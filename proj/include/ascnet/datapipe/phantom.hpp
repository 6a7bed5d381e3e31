#pragma once

#include <cstdint>
#include <utility>

#include "ascnet/datapipe/slice.hpp"

namespace ascnet::datapipe {

// Synthetic desk-scale stand-in for the medical corpora: a dark background,
// a mid-intensity elliptical organ, and optionally one disk-shaped anomaly
// strictly inside the organ. Bright anomalies by default; set
// anomaly_brightness below organ_brightness for the dark-lesion variant.
struct PhantomSpec {
  int image_size = 64;                                  // divisible by 16
  std::pair<double, double> organ_radius_range = {18.0, 26.0};
  std::pair<double, double> anomaly_radius_range = {3.0, 7.0};
  double organ_brightness = 0.45;
  double anomaly_brightness = 0.9;                      // in (0, 1]
  double noise_std = 0.0;

  void validate() const;
};

struct PhantomResult {
  Slice slice;
  Mask mask;  // anomaly pixels; all zeros when with_anomaly is false
};

// Deterministic in (spec, with_anomaly, seed). Throws a data error when no
// anomaly placement can fit strictly inside the organ.
PhantomResult generate_phantom(const PhantomSpec& spec, bool with_anomaly, uint64_t seed);

}  // namespace ascnet::datapipe
