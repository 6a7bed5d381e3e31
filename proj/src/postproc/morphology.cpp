#include "ascnet/postproc/morphology.hpp"

#include "ascnet/core/error.hpp"

namespace ascnet::postproc {

namespace {

void se_offsets(StructuringElement se, int& lo, int& hi) {
  if (se.size < 1) throw config_error("structuring element size must be >= 1");
  if (se.size % 2 == 1) {
    lo = -(se.size - 1) / 2;
    hi = (se.size - 1) / 2;
  } else {
    lo = -(se.size / 2 - 1);
    hi = se.size / 2;
  }
}

}  // namespace

datapipe::Mask erode(const datapipe::Mask& mask, StructuringElement se) {
  int lo, hi;
  se_offsets(se, lo, hi);
  datapipe::Mask out;
  out.height = mask.height;
  out.width = mask.width;
  out.pixels.assign(mask.pixels.size(), 0);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      bool all = true;
      for (int dy = lo; dy <= hi && all; ++dy) {
        int yy = y + dy;
        if (yy < 0 || yy >= mask.height) {
          all = false;
          break;
        }
        for (int dx = lo; dx <= hi; ++dx) {
          int xx = x + dx;
          if (xx < 0 || xx >= mask.width || mask.at(yy, xx) == 0) {
            all = false;
            break;
          }
        }
      }
      if (all) out.at(y, x) = 1;
    }
  }
  return out;
}

datapipe::Mask dilate(const datapipe::Mask& mask, StructuringElement se) {
  int lo, hi;
  se_offsets(se, lo, hi);
  datapipe::Mask out;
  out.height = mask.height;
  out.width = mask.width;
  out.pixels.assign(mask.pixels.size(), 0);
  // Union of translates: every foreground pixel stamps the element.
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(y, x) == 0) continue;
      for (int dy = lo; dy <= hi; ++dy) {
        int yy = y + dy;
        if (yy < 0 || yy >= mask.height) continue;
        for (int dx = lo; dx <= hi; ++dx) {
          int xx = x + dx;
          if (xx < 0 || xx >= mask.width) continue;
          out.at(yy, xx) = 1;
        }
      }
    }
  }
  return out;
}

datapipe::Mask morphological_open(const datapipe::Mask& mask, StructuringElement se) {
  return dilate(erode(mask, se), se);
}

datapipe::Mask modality_gate(const datapipe::Mask& mask, const datapipe::Slice& gate_image,
                             int gate_threshold) {
  if (mask.height != gate_image.height || mask.width != gate_image.width) {
    throw config_error("modality_gate: shape mismatch");
  }
  datapipe::Mask out = mask;
  for (size_t p = 0; p < out.pixels.size(); ++p) {
    if (datapipe::intensity_bin(gate_image.pixels[p]) < gate_threshold) out.pixels[p] = 0;
  }
  return out;
}

}  // namespace ascnet::postproc
