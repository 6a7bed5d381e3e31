#pragma once

#include <map>
#include <string>

#include "ascnet/netgraph/model.hpp"

namespace ascnet::netgraph {

// Versioned little-endian binary bundle: config echo (JSON), training
// position, every named parameter tensor, batchnorm statistics, plus any
// extra named tensors (the trainer stores optimizer moments there).
// Round-trips bit-exactly.
void save_model_bundle(const std::string& path, ModelState& state,
                       const std::map<std::string, Tensor>& extra);

ModelState load_model_bundle(const std::string& path, std::map<std::string, Tensor>* extra);

}  // namespace ascnet::netgraph
