#include <algorithm>
#include <cstdint>
#include <vector>

#include "ascnet/cli/commands.hpp"
#include "ascnet/core/error.hpp"
#include "ascnet/datapipe/png_io.hpp"

namespace ascnet::cli {

void render_histogram_png(const std::string& path, const segmenter::Histogram256& h,
                          int width, int height) {
  if (width < 64 || height < 32) throw config_error("histogram plot too small");
  const int margin = 8;
  const int plot_w = width - 2 * margin;
  const int plot_h = height - 2 * margin;
  std::vector<uint8_t> img(static_cast<size_t>(width) * height, 255);

  uint64_t peak = 1;
  for (uint64_t c : h.counts) peak = std::max(peak, c);

  for (int b = 0; b < 256; ++b) {
    int x0 = margin + b * plot_w / 256;
    int x1 = margin + (b + 1) * plot_w / 256;
    int bar = static_cast<int>(static_cast<double>(h.counts[static_cast<size_t>(b)]) /
                               static_cast<double>(peak) * plot_h);
    for (int x = x0; x < std::max(x1, x0 + 1); ++x) {
      for (int y = 0; y < bar; ++y) {
        img[static_cast<size_t>(height - 1 - margin - y) * width + x] = 64;
      }
    }
  }
  // Baseline.
  for (int x = margin; x < width - margin; ++x) {
    img[static_cast<size_t>(height - margin) * width + x] = 0;
  }
  datapipe::write_png_gray8(path, img.data(), width, height);
}

}  // namespace ascnet::cli
