#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ascnet::datapipe {

// 2D grayscale slice, intensities in [0,1]. Height and width must be
// divisible by 16 so the four 2x pooling stages divide exactly.
struct Slice {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;  // row-major
  std::string subject_id;
  int index = 0;

  double at(int y, int x) const { return pixels[static_cast<size_t>(y) * width + x]; }
  double& at(int y, int x) { return pixels[static_cast<size_t>(y) * width + x]; }
};

// Binary mask with the same geometry as its source slice.
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> pixels;  // 0 or 1

  uint8_t at(int y, int x) const { return pixels[static_cast<size_t>(y) * width + x]; }
  uint8_t& at(int y, int x) { return pixels[static_cast<size_t>(y) * width + x]; }

  size_t foreground() const {
    size_t f = 0;
    for (uint8_t p : pixels) f += p;
    return f;
  }
};

// Throws a data error when the slice violates its invariants (range,
// divisibility, finiteness).
void validate_slice(const Slice& slice);

// 0-255 intensity bin of a [0,1] pixel value.
inline int intensity_bin(double v) {
  int b = static_cast<int>(v * 255.0 + (v >= 0.0 ? 0.5 : -0.5));
  if (b < 0) b = 0;
  if (b > 255) b = 255;
  return b;
}

}  // namespace ascnet::datapipe
