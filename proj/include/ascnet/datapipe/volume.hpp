#pragma once

#include <array>
#include <string>
#include <vector>

#include "ascnet/datapipe/slice.hpp"

namespace ascnet::datapipe {

// 3D scan in raw intensity units. Axial slices are planes of constant z.
struct Volume {
  int depth = 0;
  int height = 0;
  int width = 0;
  std::vector<double> voxels;  // z-major, then row-major
  std::array<double, 3> spacing = {1.0, 1.0, 1.0};
  std::string subject_id;

  double at(int z, int y, int x) const {
    return voxels[(static_cast<size_t>(z) * height + y) * width + x];
  }
  double& at(int z, int y, int x) {
    return voxels[(static_cast<size_t>(z) * height + y) * width + x];
  }
};

// Min-max rescale over the whole 3D volume; a constant volume maps to all
// zeros. Throws on non-finite voxels.
Volume normalize_volume(const Volume& v);

// Axial slices whose nonzero-pixel fraction reaches the threshold, resized to
// a 16-divisible target (bilinear). target_h/target_w of 0 means "round each
// dimension up to the next multiple of 16". Throws when nothing passes.
std::vector<Slice> extract_slices(const Volume& v, double min_nonzero_fraction,
                                  int target_h = 0, int target_w = 0);

// Bilinear resample of a single slice image.
std::vector<double> resize_bilinear(const std::vector<double>& src, int src_h, int src_w,
                                    int dst_h, int dst_w);

}  // namespace ascnet::datapipe
