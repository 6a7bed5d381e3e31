#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ascnet/datapipe/slice.hpp"

namespace ascnet::datapipe {

// 8-bit grayscale PNG I/O (the only pixel format the pipeline stores).
// Writing always uses filter 0 rows, so output bytes are reproducible.
void write_png_gray8(const std::string& path, const uint8_t* data, int width, int height);
std::vector<uint8_t> read_png_gray8(const std::string& path, int& width, int& height);

// Slice <-> PNG. Pixel value v is stored as round(v * 255).
void save_slice_png(const std::string& path, const Slice& slice);
Slice load_slice_png(const std::string& path, const std::string& subject_id = "", int index = 0);

// Mask <-> PNG, stored as {0, 255}; any nonzero byte loads as foreground.
void save_mask_png(const std::string& path, const Mask& mask);
Mask load_mask_png(const std::string& path);

}  // namespace ascnet::datapipe
