#include "ascnet/datapipe/volume.hpp"

#include <algorithm>
#include <cmath>

#include "ascnet/core/error.hpp"

namespace ascnet::datapipe {

void validate_slice(const Slice& slice) {
  if (slice.height <= 0 || slice.width <= 0) {
    throw data_error("slice has non-positive dimensions");
  }
  if (slice.height % 16 != 0 || slice.width % 16 != 0) {
    throw data_error("slice dimensions must be divisible by 16, got " +
                     std::to_string(slice.height) + "x" + std::to_string(slice.width));
  }
  if (slice.pixels.size() != static_cast<size_t>(slice.height) * slice.width) {
    throw data_error("slice pixel buffer does not match its dimensions");
  }
  for (double p : slice.pixels) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw data_error("slice pixel outside [0,1]");
    }
  }
}

Volume normalize_volume(const Volume& v) {
  if (v.voxels.empty()) throw data_error("empty volume: " + v.subject_id);
  double lo = v.voxels[0], hi = v.voxels[0];
  for (double x : v.voxels) {
    if (!std::isfinite(x)) throw data_error("non-finite voxel in volume: " + v.subject_id);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  Volume out = v;
  if (hi == lo) {
    std::fill(out.voxels.begin(), out.voxels.end(), 0.0);
    return out;
  }
  double inv = 1.0 / (hi - lo);
  for (double& x : out.voxels) x = (x - lo) * inv;
  return out;
}

std::vector<double> resize_bilinear(const std::vector<double>& src, int src_h, int src_w,
                                    int dst_h, int dst_w) {
  std::vector<double> dst(static_cast<size_t>(dst_h) * dst_w);
  if (src_h == dst_h && src_w == dst_w) {
    dst = src;
    return dst;
  }
  // Pixel-center alignment.
  double sy = static_cast<double>(src_h) / dst_h;
  double sx = static_cast<double>(src_w) / dst_w;
  for (int y = 0; y < dst_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y0c = std::clamp(y0, 0, src_h - 1);
    int y1c = std::clamp(y0 + 1, 0, src_h - 1);
    for (int x = 0; x < dst_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x0c = std::clamp(x0, 0, src_w - 1);
      int x1c = std::clamp(x0 + 1, 0, src_w - 1);
      double top = src[static_cast<size_t>(y0c) * src_w + x0c] * (1.0 - wx) +
                   src[static_cast<size_t>(y0c) * src_w + x1c] * wx;
      double bot = src[static_cast<size_t>(y1c) * src_w + x0c] * (1.0 - wx) +
                   src[static_cast<size_t>(y1c) * src_w + x1c] * wx;
      dst[static_cast<size_t>(y) * dst_w + x] = top * (1.0 - wy) + bot * wy;
    }
  }
  return dst;
}

namespace {

int round_up16(int v) { return ((v + 15) / 16) * 16; }

}  // namespace

std::vector<Slice> extract_slices(const Volume& v, double min_nonzero_fraction,
                                  int target_h, int target_w) {
  if (v.depth <= 0 || v.height <= 0 || v.width <= 0) {
    throw data_error("volume has non-positive dimensions: " + v.subject_id);
  }
  if (target_h == 0) target_h = round_up16(v.height);
  if (target_w == 0) target_w = round_up16(v.width);
  if (target_h % 16 != 0 || target_w % 16 != 0) {
    throw config_error("extract_slices target shape must be divisible by 16");
  }

  std::vector<Slice> out;
  size_t plane = static_cast<size_t>(v.height) * v.width;
  for (int z = 0; z < v.depth; ++z) {
    const double* p = v.voxels.data() + static_cast<size_t>(z) * plane;
    size_t nonzero = 0;
    for (size_t i = 0; i < plane; ++i) nonzero += p[i] != 0.0;
    if (static_cast<double>(nonzero) / plane < min_nonzero_fraction) continue;

    Slice s;
    s.height = target_h;
    s.width = target_w;
    s.pixels = resize_bilinear(std::vector<double>(p, p + plane), v.height, v.width,
                               target_h, target_w);
    // Bilinear mixing stays inside the hull of the inputs; clamp anyway so
    // the [0,1] invariant survives float noise.
    for (double& x : s.pixels) x = std::clamp(x, 0.0, 1.0);
    s.subject_id = v.subject_id;
    s.index = z;
    validate_slice(s);
    out.push_back(std::move(s));
  }
  if (out.empty()) {
    throw data_error("no slice passed the nonzero filter for subject " + v.subject_id);
  }
  return out;
}

}  // namespace ascnet::datapipe
