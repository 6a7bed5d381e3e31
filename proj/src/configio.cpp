#include "ascnet/configio.hpp"

#include "ascnet/core/error.hpp"

using nlohmann::json;

namespace ascnet::netgraph {

void to_json(json& j, const NetworkConfig& c) {
  j = json{{"input_size", {c.input_h, c.input_w}},
           {"encoder_channels", c.encoder_channels},
           {"transition_channels", c.transition_channels},
           {"conv_kernel", c.conv_kernel},
           {"pool_kernel", c.pool_kernel},
           {"dropout_rate", c.dropout_rate},
           {"skip_connections", c.skip_connections}};
}

void from_json(const json& j, NetworkConfig& c) {
  if (j.contains("input_size")) {
    c.input_h = j.at("input_size").at(0).get<int>();
    c.input_w = j.at("input_size").at(1).get<int>();
  }
  c.encoder_channels = j.value("encoder_channels", c.encoder_channels);
  c.transition_channels = j.value("transition_channels", c.transition_channels);
  c.conv_kernel = j.value("conv_kernel", c.conv_kernel);
  c.pool_kernel = j.value("pool_kernel", c.pool_kernel);
  c.dropout_rate = j.value("dropout_rate", c.dropout_rate);
  c.skip_connections = j.value("skip_connections", c.skip_connections);
}

}  // namespace ascnet::netgraph

namespace ascnet::trainer {

void to_json(json& j, const TrainConfig& c) {
  j = json{{"stage1_cycles", c.stage1_cycles},
           {"stage2_cycles", c.stage2_cycles},
           {"epochs_per_d_step", c.epochs_per_d_step},
           {"epochs_per_m_step", c.epochs_per_m_step},
           {"batch_size", c.batch_size},
           {"learning_rate", c.learning_rate},
           {"loss_weights", c.loss_weights},
           {"seed", c.seed},
           {"early_stop_on_peaks", c.early_stop_on_peaks},
           {"refresh_augment_each_cycle", c.refresh_augment_each_cycle},
           {"eval_subset_size", c.eval_subset_size},
           {"min_peak_count", c.min_peak_count},
           {"peak_smooth_window", c.peak_params.smooth_window},
           {"peak_min_prominence_fraction", c.peak_params.min_prominence_fraction},
           {"peak_min_separation", c.peak_params.min_separation}};
}

void from_json(const json& j, TrainConfig& c) {
  c.stage1_cycles = j.value("stage1_cycles", c.stage1_cycles);
  c.stage2_cycles = j.value("stage2_cycles", c.stage2_cycles);
  c.epochs_per_d_step = j.value("epochs_per_d_step", c.epochs_per_d_step);
  c.epochs_per_m_step = j.value("epochs_per_m_step", c.epochs_per_m_step);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.loss_weights = j.value("loss_weights", c.loss_weights);
  c.seed = j.value("seed", c.seed);
  c.early_stop_on_peaks = j.value("early_stop_on_peaks", c.early_stop_on_peaks);
  c.refresh_augment_each_cycle =
      j.value("refresh_augment_each_cycle", c.refresh_augment_each_cycle);
  c.eval_subset_size = j.value("eval_subset_size", c.eval_subset_size);
  c.min_peak_count = j.value("min_peak_count", c.min_peak_count);
  c.peak_params.smooth_window = j.value("peak_smooth_window", c.peak_params.smooth_window);
  c.peak_params.min_prominence_fraction =
      j.value("peak_min_prominence_fraction", c.peak_params.min_prominence_fraction);
  c.peak_params.min_separation = j.value("peak_min_separation", c.peak_params.min_separation);
}

}  // namespace ascnet::trainer

namespace ascnet::segmenter {

void to_json(json& j, const ThresholdRule& r) {
  j = json{{"polarity", r.polarity == Polarity::bright ? "bright" : "dark"},
           {"roi_required", r.roi_required}};
  if (r.threshold_override.has_value()) {
    j["threshold_override"] = *r.threshold_override;
  } else {
    j["threshold_override"] = nullptr;
  }
}

void from_json(const json& j, ThresholdRule& r) {
  std::string pol = j.value("polarity", std::string("bright"));
  if (pol == "bright") {
    r.polarity = Polarity::bright;
  } else if (pol == "dark") {
    r.polarity = Polarity::dark;
  } else {
    throw ascnet::config_error("polarity must be 'bright' or 'dark', got '" + pol + "'");
  }
  r.roi_required = j.value("roi_required", r.roi_required);
  if (j.contains("threshold_override") && !j.at("threshold_override").is_null()) {
    r.threshold_override = j.at("threshold_override").get<int>();
  }
}

}  // namespace ascnet::segmenter

namespace ascnet::datapipe {

void to_json(json& j, const PhantomSpec& s) {
  j = json{{"image_size", s.image_size},
           {"organ_radius_range", {s.organ_radius_range.first, s.organ_radius_range.second}},
           {"anomaly_radius_range",
            {s.anomaly_radius_range.first, s.anomaly_radius_range.second}},
           {"organ_brightness", s.organ_brightness},
           {"anomaly_brightness", s.anomaly_brightness},
           {"noise_std", s.noise_std}};
}

void from_json(const json& j, PhantomSpec& s) {
  s.image_size = j.value("image_size", s.image_size);
  if (j.contains("organ_radius_range")) {
    s.organ_radius_range = {j.at("organ_radius_range").at(0).get<double>(),
                            j.at("organ_radius_range").at(1).get<double>()};
  }
  if (j.contains("anomaly_radius_range")) {
    s.anomaly_radius_range = {j.at("anomaly_radius_range").at(0).get<double>(),
                              j.at("anomaly_radius_range").at(1).get<double>()};
  }
  s.organ_brightness = j.value("organ_brightness", s.organ_brightness);
  s.anomaly_brightness = j.value("anomaly_brightness", s.anomaly_brightness);
  s.noise_std = j.value("noise_std", s.noise_std);
}

}  // namespace ascnet::datapipe
