#pragma once

#include <json.hpp>

#include "ascnet/datapipe/phantom.hpp"
#include "ascnet/netgraph/config.hpp"
#include "ascnet/segmenter/threshold.hpp"
#include "ascnet/trainer/trainer.hpp"

// JSON adapters for the config types (nlohmann ADL).

namespace ascnet::netgraph {
void to_json(nlohmann::json& j, const NetworkConfig& c);
void from_json(const nlohmann::json& j, NetworkConfig& c);
}  // namespace ascnet::netgraph

namespace ascnet::trainer {
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
}  // namespace ascnet::trainer

namespace ascnet::segmenter {
void to_json(nlohmann::json& j, const ThresholdRule& r);
void from_json(const nlohmann::json& j, ThresholdRule& r);
}  // namespace ascnet::segmenter

namespace ascnet::datapipe {
void to_json(nlohmann::json& j, const PhantomSpec& s);
void from_json(const nlohmann::json& j, PhantomSpec& s);
}  // namespace ascnet::datapipe
