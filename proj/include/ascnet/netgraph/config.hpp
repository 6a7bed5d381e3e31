#pragma once

#include <string>
#include <vector>

namespace ascnet::netgraph {

// Architecture of the main module M (encoder E, decoders C_f and C_w,
// reconstructor R) and the discriminator D, which reuses the encoder trunk.
struct NetworkConfig {
  int input_h = 64;
  int input_w = 64;
  std::vector<int> encoder_channels = {32, 64, 128, 256};
  int transition_channels = 512;
  int conv_kernel = 3;  // 3x3, same padding
  int pool_kernel = 2;  // 2x2, stride 2
  double dropout_rate = 0.3;
  bool skip_connections = true;

  int levels() const { return static_cast<int>(encoder_channels.size()); }

  // Throws a config error listing every violation.
  void validate() const;
};

}  // namespace ascnet::netgraph
