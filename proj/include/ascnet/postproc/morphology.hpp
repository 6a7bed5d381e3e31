#pragma once

#include "ascnet/datapipe/slice.hpp"

namespace ascnet::postproc {

// Square all-ones structuring element. Odd sizes center on the pixel; even
// sizes anchor at the top-left of the center 2x2 (offsets -(k/2-1) .. k/2).
struct StructuringElement {
  int size = 5;
};

datapipe::Mask erode(const datapipe::Mask& mask, StructuringElement se);
datapipe::Mask dilate(const datapipe::Mask& mask, StructuringElement se);

// Erosion then dilation. Out-of-bounds neighborhoods count as background for
// erosion and are ignored for dilation.
datapipe::Mask morphological_open(const datapipe::Mask& mask, StructuringElement se);

// Keeps mask pixels whose gate-image intensity reaches gate_threshold (0-255
// scale); the T2-predictions-times-Flair cleanup.
datapipe::Mask modality_gate(const datapipe::Mask& mask, const datapipe::Slice& gate_image,
                             int gate_threshold);

}  // namespace ascnet::postproc
