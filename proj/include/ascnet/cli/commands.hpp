#pragma once

#include <string>
#include <vector>

#include "ascnet/segmenter/histogram.hpp"

namespace ascnet::cli {

// Entry point shared by the binary and the CLI tests. argv[0] is the program
// name. Exit codes: 0 success, 2 usage/config error, 3 runtime/numerical
// error, 4 I/O error.
int run_cli(const std::vector<std::string>& args);

// Bar-chart rendering of a histogram as an 8-bit grayscale PNG.
void render_histogram_png(const std::string& path, const segmenter::Histogram256& h,
                          int width = 640, int height = 320);

}  // namespace ascnet::cli
