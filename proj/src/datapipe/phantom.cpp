#include "ascnet/datapipe/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "ascnet/core/error.hpp"
#include "ascnet/core/rng.hpp"
#include "ascnet/datapipe/volume.hpp"

namespace ascnet::datapipe {

void PhantomSpec::validate() const {
  if (image_size < 16 || image_size % 16 != 0) {
    throw config_error("phantom image_size must be a positive multiple of 16");
  }
  if (organ_radius_range.first > organ_radius_range.second ||
      anomaly_radius_range.first > anomaly_radius_range.second) {
    throw config_error("phantom radius ranges must be ordered low <= high");
  }
  if (organ_radius_range.first <= 0.0 || anomaly_radius_range.first <= 0.0) {
    throw config_error("phantom radii must be positive");
  }
  if (anomaly_brightness <= 0.0 || anomaly_brightness > 1.0) {
    throw config_error("anomaly_brightness must be in (0,1]");
  }
  if (organ_brightness < 0.0 || organ_brightness > 1.0) {
    throw config_error("organ_brightness must be in [0,1]");
  }
  if (noise_std < 0.0) throw config_error("noise_std must be >= 0");
}

PhantomResult generate_phantom(const PhantomSpec& spec, bool with_anomaly, uint64_t seed) {
  spec.validate();
  const int n = spec.image_size;
  Rng rng(mix_seed(seed, 0x70686eULL));

  double ra = rng.uniform(spec.organ_radius_range.first, spec.organ_radius_range.second);
  double rb = rng.uniform(spec.organ_radius_range.first, spec.organ_radius_range.second);
  // Keep the organ inside the frame with a 2-pixel margin.
  double max_r = n / 2.0 - 2.0;
  ra = std::min(ra, max_r);
  rb = std::min(rb, max_r);
  double jitter = n * 0.05;
  double cx = n / 2.0 + rng.uniform(-jitter, jitter);
  double cy = n / 2.0 + rng.uniform(-jitter, jitter);
  double angle = rng.uniform(0.0, 3.14159265358979323846);
  double ca = std::cos(angle), sa = std::sin(angle);

  PhantomResult out;
  out.slice.height = n;
  out.slice.width = n;
  out.slice.pixels.assign(static_cast<size_t>(n) * n, 0.0);
  out.mask.height = n;
  out.mask.width = n;
  out.mask.pixels.assign(static_cast<size_t>(n) * n, 0);

  auto organ_dist = [&](double px, double py) {
    double dx = px - cx, dy = py - cy;
    double u = dx * ca + dy * sa;
    double v = -dx * sa + dy * ca;
    return (u * u) / (ra * ra) + (v * v) / (rb * rb);
  };

  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (organ_dist(x + 0.5, y + 0.5) <= 1.0) {
        out.slice.at(y, x) = spec.organ_brightness;
      }
    }
  }

  if (with_anomaly) {
    double anomaly_r = rng.uniform(spec.anomaly_radius_range.first,
                                   spec.anomaly_radius_range.second);
    // The disk plus one pixel of organ rim must fit inside the smaller
    // semi-axis, otherwise placement is impossible for this spec.
    double rmin = std::min(ra, rb);
    if (anomaly_r + 1.5 >= rmin) {
      throw data_error("anomaly radius " + std::to_string(anomaly_r) +
                       " cannot fit strictly inside organ (min semi-axis " +
                       std::to_string(rmin) + ")");
    }
    // Place the center so the whole disk stays strictly inside the ellipse:
    // shrink the ellipse by (anomaly_r + 1) and sample within it.
    double shrink = 1.0 - (anomaly_r + 1.0) / rmin;
    double acx = 0.0, acy = 0.0;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 256) throw data_error("anomaly placement failed");
      double u = rng.uniform(-shrink, shrink);
      double v = rng.uniform(-shrink, shrink);
      if (u * u + v * v > shrink * shrink) continue;
      acx = cx + (u * ra) * ca - (v * rb) * sa;
      acy = cy + (u * ra) * sa + (v * rb) * ca;
      break;
    }
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        double dx = x + 0.5 - acx, dy = y + 0.5 - acy;
        if (dx * dx + dy * dy <= anomaly_r * anomaly_r) {
          out.slice.at(y, x) = spec.anomaly_brightness;
          out.mask.at(y, x) = 1;
        }
      }
    }
    // Every anomaly pixel must sit inside the organ.
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (out.mask.at(y, x) && organ_dist(x + 0.5, y + 0.5) >= 1.0) {
          throw data_error("anomaly escaped the organ ellipse");
        }
      }
    }
  }

  if (spec.noise_std > 0.0) {
    for (double& p : out.slice.pixels) {
      p = std::clamp(p + spec.noise_std * rng.gaussian(), 0.0, 1.0);
    }
  }

  validate_slice(out.slice);
  return out;
}

}  // namespace ascnet::datapipe
