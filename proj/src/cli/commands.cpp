#include "ascnet/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "ascnet/configio.hpp"
#include "ascnet/core/error.hpp"
#include "ascnet/core/rng.hpp"
#include "ascnet/datapipe/balance.hpp"
#include "ascnet/datapipe/manifest.hpp"
#include "ascnet/datapipe/phantom.hpp"
#include "ascnet/datapipe/png_io.hpp"
#include "ascnet/evaluator/dice.hpp"
#include "ascnet/netgraph/checkpoint.hpp"
#include "ascnet/postproc/morphology.hpp"
#include "ascnet/segmenter/threshold.hpp"
#include "ascnet/trainer/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ascnet::cli {

namespace {

using datapipe::Mask;
using datapipe::Slice;

std::string zero_pad(int v, int width = 4) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*d", width, v);
  return buf;
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == '/' || c == '\\' || c == ' ') c = '-';
  }
  return out;
}

std::string mask_file_name(const Slice& s) {
  return sanitize(s.subject_id) + "_" + zero_pad(s.index) + ".png";
}

std::vector<Slice> load_slices_from_manifests(const std::vector<std::string>& manifests) {
  std::vector<Slice> out;
  for (const auto& path : manifests) {
    datapipe::SubjectRecord rec = datapipe::load_subject(path);
    std::vector<Slice> slices = datapipe::load_subject_slices(rec);
    for (auto& s : slices) {
      datapipe::validate_slice(s);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<Mask> load_masks_from_manifests(const std::vector<std::string>& manifests) {
  std::vector<Mask> out;
  for (const auto& path : manifests) {
    datapipe::SubjectRecord rec = datapipe::load_subject(path);
    for (const auto& p : rec.slice_paths) out.push_back(datapipe::load_mask_png(p));
  }
  return out;
}

void require_uniform_shape(const std::vector<Slice>& slices, int h, int w) {
  for (const auto& s : slices) {
    if (s.height != h || s.width != w) {
      throw config_error("slice " + s.subject_id + "#" + std::to_string(s.index) +
                         " has shape " + std::to_string(s.height) + "x" +
                         std::to_string(s.width) + ", expected " + std::to_string(h) + "x" +
                         std::to_string(w));
    }
  }
}

// ---------------------------------------------------------------------------
// phantom-gen

struct PhantomGenArgs {
  int n = 0;
  uint64_t seed = 0;
  std::string out_dir;
  datapipe::PhantomSpec spec;
  bool dark = false;
  bool brightness_set = false;
};

void cmd_phantom_gen(PhantomGenArgs& a) {
  if (a.dark && !a.brightness_set) a.spec.anomaly_brightness = 0.15;
  a.spec.validate();

  fs::path out(a.out_dir);
  std::error_code ec;
  fs::create_directories(out / "slices", ec);
  fs::create_directories(out / "masks", ec);
  if (ec) throw io_error("cannot create output directory: " + a.out_dir);

  datapipe::SubjectRecord normal, anomalous;
  normal.subject_id = "phantom_normal";
  normal.modality = "phantom";
  anomalous.subject_id = "phantom_anomalous";
  anomalous.modality = "phantom";
  anomalous.mask_paths.emplace();

  for (int i = 0; i < a.n; ++i) {
    auto r = datapipe::generate_phantom(a.spec, false, mix_seed(a.seed, 0xB0ULL, i));
    std::string p = (out / "slices" / ("normal_" + zero_pad(i) + ".png")).string();
    datapipe::save_slice_png(p, r.slice);
    normal.slice_paths.push_back(p);
  }
  for (int i = 0; i < a.n; ++i) {
    auto r = datapipe::generate_phantom(a.spec, true, mix_seed(a.seed, 0xA0ULL, i));
    std::string p = (out / "slices" / ("anomalous_" + zero_pad(i) + ".png")).string();
    std::string mp = (out / "masks" / ("anomalous_" + zero_pad(i) + ".png")).string();
    datapipe::save_slice_png(p, r.slice);
    datapipe::save_mask_png(mp, r.mask);
    anomalous.slice_paths.push_back(p);
    anomalous.mask_paths->push_back(mp);
  }
  datapipe::save_subject_manifest((out / "normal.json").string(), normal);
  datapipe::save_subject_manifest((out / "anomalous.json").string(), anomalous);
  std::cout << "wrote " << 2 * a.n << " slices, " << a.n << " masks, 2 manifests under "
            << a.out_dir << "\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<uint64_t> seed;
  std::optional<int> stage1, stage2, epochs_d, epochs_m, batch;
  std::optional<double> lr;
};

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw config_error("invalid config JSON in " + path + ": " + e.what());
  }
}

std::vector<std::string> manifest_list(const json& data, const char* key,
                                       const fs::path& base) {
  std::vector<std::string> out;
  if (!data.contains(key)) return out;
  for (const auto& p : data.at(key)) {
    fs::path mp(p.get<std::string>());
    out.push_back(mp.is_absolute() ? mp.string() : (base / mp).string());
  }
  return out;
}

void validate_both(const netgraph::NetworkConfig& net, const trainer::TrainConfig& tc) {
  std::string problems;
  try {
    net.validate();
  } catch (const Error& e) {
    problems += e.what();
  }
  try {
    tc.validate();
  } catch (const Error& e) {
    if (!problems.empty()) problems += "; ";
    problems += e.what();
  }
  if (!problems.empty()) throw config_error(problems);
}

void cmd_train(TrainArgs& a) {
  json cfg = load_json_file(a.config_path);
  fs::path base = fs::path(a.config_path).parent_path();

  netgraph::NetworkConfig net;
  if (cfg.contains("network")) net = cfg.at("network").get<netgraph::NetworkConfig>();
  trainer::TrainConfig tc;
  if (cfg.contains("train")) tc = cfg.at("train").get<trainer::TrainConfig>();
  uint64_t seed = cfg.value("seed", static_cast<uint64_t>(0));
  std::string out_dir = cfg.value("out_dir", std::string("run"));
  if (!cfg.contains("data")) throw config_error("config is missing the 'data' section");
  auto input_manifests = manifest_list(cfg.at("data"), "input_manifests", base);
  auto reference_manifests = manifest_list(cfg.at("data"), "reference_manifests", base);

  // Flag overrides.
  if (a.seed) seed = *a.seed;
  if (a.out_dir) out_dir = *a.out_dir;
  if (a.stage1) tc.stage1_cycles = *a.stage1;
  if (a.stage2) tc.stage2_cycles = *a.stage2;
  if (a.epochs_d) tc.epochs_per_d_step = *a.epochs_d;
  if (a.epochs_m) tc.epochs_per_m_step = *a.epochs_m;
  if (a.batch) tc.batch_size = *a.batch;
  if (a.lr) tc.learning_rate = *a.lr;
  tc.seed = seed;

  validate_both(net, tc);
  if (input_manifests.empty()) throw config_error("data.input_manifests is empty");
  if (reference_manifests.empty()) throw config_error("data.reference_manifests is empty");

  std::vector<Slice> inputs = load_slices_from_manifests(input_manifests);
  datapipe::ReferenceSet reference;
  reference.slices = load_slices_from_manifests(reference_manifests);
  require_uniform_shape(inputs, net.input_h, net.input_w);
  require_uniform_shape(reference.slices, net.input_h, net.input_w);

  auto [balanced_inputs, balanced_reference] =
      datapipe::balance_sets(std::move(inputs), std::move(reference), mix_seed(seed, 0xba1ULL));

  netgraph::ModelState state = netgraph::init_model(net, mix_seed(seed, 1));
  trainer::run_training(state, balanced_inputs, balanced_reference, tc, out_dir);

  // Full resolved config echo (run_training wrote the network/train subset).
  json echo;
  echo["seed"] = seed;
  echo["out_dir"] = out_dir;
  echo["data"] = {{"input_manifests", input_manifests},
                  {"reference_manifests", reference_manifests}};
  echo["network"] = net;
  echo["train"] = tc;
  if (cfg.contains("threshold")) echo["threshold"] = cfg.at("threshold");
  if (cfg.contains("postproc")) echo["postproc"] = cfg.at("postproc");
  std::ofstream out(fs::path(out_dir) / "config.json");
  if (!out) throw io_error("cannot write config echo: " + out_dir + "/config.json");
  out << echo.dump(2) << "\n";
  std::cout << "training complete; artifacts in " << out_dir << "\n";
}

// ---------------------------------------------------------------------------
// segment

struct SegmentArgs {
  std::string checkpoint;
  std::vector<std::string> manifests;
  std::vector<std::string> roi_manifests;
  std::string out_dir;
  std::string polarity = "bright";
  std::optional<int> threshold;
  bool roi_required = false;
  bool per_subject = false;
  std::string postproc = "none";  // none | open | gate
  int se_size = 5;
  std::vector<std::string> gate_manifests;
  int gate_threshold = 50;
  bool emit_both_peak_masks = false;
  int batch_size = 8;
  segmenter::PeakParams peak_params;
};

segmenter::ThresholdRule rule_from_args(const SegmentArgs& a) {
  segmenter::ThresholdRule rule;
  if (a.polarity == "bright") {
    rule.polarity = segmenter::Polarity::bright;
  } else if (a.polarity == "dark") {
    rule.polarity = segmenter::Polarity::dark;
  } else {
    throw config_error("--polarity must be 'bright' or 'dark'");
  }
  rule.threshold_override = a.threshold;
  rule.roi_required = a.roi_required;
  return rule;
}

// Threshold selection operates on the histogram of the image as thresholded:
// dark polarity inverts first (ROI pixels only) and then takes the rightmost
// peak of that inverted histogram, matching the invert-then-threshold recipe.
int choose_threshold(const segmenter::Histogram256& hist, const segmenter::ThresholdRule& rule,
                     const segmenter::PeakParams& params) {
  if (rule.threshold_override.has_value()) {
    return segmenter::select_threshold({}, rule);
  }
  segmenter::PeakList peaks = segmenter::detect_peaks(hist, params);
  segmenter::ThresholdRule bright_rule = rule;
  bright_rule.polarity = segmenter::Polarity::bright;
  return segmenter::select_threshold(peaks, bright_rule);
}

void cmd_segment(SegmentArgs& a) {
  segmenter::ThresholdRule rule = rule_from_args(a);
  netgraph::ModelState state = trainer::load_checkpoint(a.checkpoint, nullptr);

  std::vector<Slice> inputs = load_slices_from_manifests(a.manifests);
  require_uniform_shape(inputs, state.config.input_h, state.config.input_w);

  std::vector<Mask> rois;
  const std::vector<Mask>* roi_ptr = nullptr;
  if (!a.roi_manifests.empty()) {
    rois = load_masks_from_manifests(a.roi_manifests);
    if (rois.size() != inputs.size()) {
      throw config_error("ROI count (" + std::to_string(rois.size()) +
                         ") does not match slice count (" + std::to_string(inputs.size()) + ")");
    }
    roi_ptr = &rois;
  }
  if (rule.roi_required && roi_ptr == nullptr) {
    throw config_error("threshold rule requires an ROI mask but none was given (--roi)");
  }

  std::vector<Slice> gates;
  if (a.postproc == "gate") {
    gates = load_slices_from_manifests(a.gate_manifests);
    if (gates.size() != inputs.size()) {
      throw config_error("gate image count does not match slice count");
    }
  } else if (a.postproc != "none" && a.postproc != "open") {
    throw config_error("--postproc must be none, open or gate");
  }

  fs::path out(a.out_dir);
  std::error_code ec;
  fs::create_directories(out / "masks", ec);
  if (a.postproc != "none") fs::create_directories(out / "masks_post", ec);
  if (a.emit_both_peak_masks) {
    fs::create_directories(out / "masks_first_peak", ec);
    fs::create_directories(out / "masks_last_peak", ec);
  }

  std::vector<Slice> recon = trainer::reconstruction_outputs(state, inputs, a.batch_size);
  const bool invert = rule.polarity == segmenter::Polarity::dark;

  // Dataset-level pooled histogram (the default) or one per subject.
  struct Group {
    std::vector<size_t> indices;
  };
  std::vector<std::string> group_order;
  std::map<std::string, Group> groups;
  for (size_t i = 0; i < recon.size(); ++i) {
    std::string key = a.per_subject ? recon[i].subject_id : std::string("dataset");
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) group_order.push_back(key);
    it->second.indices.push_back(i);
  }

  segmenter::Histogram256 pooled;
  json thresholds_echo = json::object();
  for (const auto& key : group_order) {
    const Group& g = groups[key];
    std::vector<Slice> group_slices;
    std::vector<Mask> group_rois;
    for (size_t i : g.indices) {
      group_slices.push_back(recon[i]);
      if (roi_ptr != nullptr) group_rois.push_back(rois[i]);
    }
    segmenter::Histogram256 hist = segmenter::compute_histogram(
        group_slices, roi_ptr != nullptr ? &group_rois : nullptr, invert);
    pooled.merge(hist);

    int t = choose_threshold(hist, rule, a.peak_params);
    thresholds_echo[key] = t;
    std::cout << "threshold[" << key << "] = " << t << "\n";

    std::optional<int> t_first, t_last;
    if (a.emit_both_peak_masks && !rule.threshold_override.has_value()) {
      segmenter::PeakList peaks = segmenter::detect_peaks(hist, a.peak_params);
      if (!peaks.empty()) {
        t_first = peaks.front().bin;
        t_last = peaks.back().bin;
      }
    }

    for (size_t i : g.indices) {
      const Mask* roi = roi_ptr != nullptr ? &rois[i] : nullptr;
      Mask mask = segmenter::apply_threshold(recon[i], t, rule, roi);
      datapipe::save_mask_png((out / "masks" / mask_file_name(recon[i])).string(), mask);

      if (a.postproc == "open") {
        Mask opened = postproc::morphological_open(mask, {a.se_size});
        datapipe::save_mask_png((out / "masks_post" / mask_file_name(recon[i])).string(),
                                opened);
      } else if (a.postproc == "gate") {
        Mask gated = postproc::modality_gate(mask, gates[i], a.gate_threshold);
        datapipe::save_mask_png((out / "masks_post" / mask_file_name(recon[i])).string(),
                                gated);
      }

      if (t_first) {
        Mask m1 = segmenter::apply_threshold(recon[i], *t_first, rule, roi);
        datapipe::save_mask_png((out / "masks_first_peak" / mask_file_name(recon[i])).string(),
                                m1);
      }
      if (t_last) {
        Mask m2 = segmenter::apply_threshold(recon[i], *t_last, rule, roi);
        datapipe::save_mask_png((out / "masks_last_peak" / mask_file_name(recon[i])).string(),
                                m2);
      }
    }
  }

  segmenter::write_histogram_csv((out / "histogram.csv").string(), pooled);
  render_histogram_png((out / "histogram.png").string(), pooled);

  json echo;
  echo["checkpoint"] = a.checkpoint;
  echo["manifests"] = a.manifests;
  echo["roi_manifests"] = a.roi_manifests;
  echo["threshold_rule"] = rule;
  echo["per_subject"] = a.per_subject;
  echo["postproc"] = {{"mode", a.postproc},
                      {"se_size", a.se_size},
                      {"gate_threshold", a.gate_threshold}};
  echo["peak_params"] = {{"smooth_window", a.peak_params.smooth_window},
                         {"min_prominence_fraction", a.peak_params.min_prominence_fraction},
                         {"min_separation", a.peak_params.min_separation}};
  echo["thresholds"] = thresholds_echo;
  std::ofstream cfg_out(out / "segment_config.json");
  cfg_out << echo.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string pred_dir;
  std::vector<std::string> gt_manifests;
  std::string level = "slice";
  std::string out_dir;
};

void cmd_eval(EvalArgs& a) {
  evaluator::AggLevel level;
  if (a.level == "subject") {
    level = evaluator::AggLevel::subject_wise;
  } else if (a.level == "slice") {
    level = evaluator::AggLevel::slice_wise;
  } else {
    throw config_error("--level must be 'subject' or 'slice'");
  }
  if (!fs::is_directory(a.pred_dir)) {
    throw io_error("prediction directory does not exist: " + a.pred_dir);
  }

  std::set<std::string> pred_files;
  for (const auto& entry : fs::directory_iterator(a.pred_dir)) {
    if (entry.path().extension() == ".png") pred_files.insert(entry.path().filename().string());
  }
  if (pred_files.empty()) throw data_error("no prediction masks in " + a.pred_dir);

  struct Loaded {
    Mask pred, gt;
    std::string subject;
    int index;
  };
  std::vector<Loaded> loaded;
  std::vector<std::string> unmatched;
  for (const auto& m : a.gt_manifests) {
    datapipe::SubjectRecord rec = datapipe::load_subject(m);
    if (!rec.mask_paths) {
      throw data_error("ground-truth manifest has no masks: " + m);
    }
    for (size_t i = 0; i < rec.mask_paths->size(); ++i) {
      std::string fname = sanitize(rec.subject_id) + "_" + zero_pad(static_cast<int>(i)) + ".png";
      if (pred_files.count(fname) == 0) {
        unmatched.push_back(rec.subject_id + "#" + std::to_string(i));
        continue;
      }
      pred_files.erase(fname);
      Loaded l;
      l.pred = datapipe::load_mask_png((fs::path(a.pred_dir) / fname).string());
      l.gt = datapipe::load_mask_png((*rec.mask_paths)[i]);
      l.subject = rec.subject_id;
      l.index = static_cast<int>(i);
      loaded.push_back(std::move(l));
    }
  }
  for (const auto& leftover : pred_files) unmatched.push_back("prediction-only: " + leftover);
  if (!unmatched.empty()) {
    std::string msg = "unmatched prediction/ground-truth ids:";
    for (const auto& u : unmatched) msg += " " + u;
    throw data_error(msg);
  }

  std::vector<evaluator::SlicePair> pairs;
  pairs.reserve(loaded.size());
  for (const auto& l : loaded) {
    pairs.push_back({l.subject, l.index, &l.pred, &l.gt});
  }
  auto table = evaluator::score_table(pairs, level);
  auto [mean, stddev] = evaluator::aggregate(table);

  fs::path out(a.out_dir.empty() ? a.pred_dir : a.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  evaluator::write_score_csv((out / "results.csv").string(), table, level);
  evaluator::write_summary_json((out / "summary.json").string(), level, mean, stddev,
                                table.size());
  std::printf("Dice (%s-wise): %.4f +- %.4f (n=%zu)\n", a.level.c_str(), mean, stddev,
              table.size());
}

// ---------------------------------------------------------------------------
// hist

struct HistArgs {
  std::vector<std::string> manifests;
  std::vector<std::string> roi_manifests;
  std::string checkpoint;
  bool invert = false;
  std::string out_csv;
  std::string out_plot;
  int batch_size = 8;
};

void cmd_hist(HistArgs& a) {
  std::vector<Slice> slices = load_slices_from_manifests(a.manifests);
  if (!a.checkpoint.empty()) {
    netgraph::ModelState state = trainer::load_checkpoint(a.checkpoint, nullptr);
    require_uniform_shape(slices, state.config.input_h, state.config.input_w);
    slices = trainer::reconstruction_outputs(state, slices, a.batch_size);
  }
  std::vector<Mask> rois;
  const std::vector<Mask>* roi_ptr = nullptr;
  if (!a.roi_manifests.empty()) {
    rois = load_masks_from_manifests(a.roi_manifests);
    roi_ptr = &rois;
  }
  segmenter::Histogram256 h = segmenter::compute_histogram(slices, roi_ptr, a.invert);
  segmenter::write_histogram_csv(a.out_csv, h);
  if (!a.out_plot.empty()) render_histogram_png(a.out_plot, h);
  std::cout << "histogram total=" << h.total << " -> " << a.out_csv << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"ASC-Net: adversarial selective cutting for unsupervised anomaly segmentation"};
  app.require_subcommand(1);

  PhantomGenArgs pg;
  auto* sub_pg = app.add_subcommand("phantom-gen", "Generate a synthetic phantom corpus");
  sub_pg->add_option("--n", pg.n, "Phantoms per class")->required()->check(CLI::PositiveNumber);
  sub_pg->add_option("--seed", pg.seed, "Random seed");
  sub_pg->add_option("--out", pg.out_dir, "Output directory")->required();
  sub_pg->add_option("--size", pg.spec.image_size, "Image size (multiple of 16)");
  sub_pg->add_option("--noise-std", pg.spec.noise_std, "Gaussian noise std");
  auto* ab = sub_pg->add_option("--anomaly-brightness", pg.spec.anomaly_brightness,
                                "Anomaly intensity in (0,1]");
  sub_pg->add_option("--organ-brightness", pg.spec.organ_brightness, "Organ intensity");
  sub_pg->add_option("--organ-radius-min", pg.spec.organ_radius_range.first, "");
  sub_pg->add_option("--organ-radius-max", pg.spec.organ_radius_range.second, "");
  sub_pg->add_option("--anomaly-radius-min", pg.spec.anomaly_radius_range.first, "");
  sub_pg->add_option("--anomaly-radius-max", pg.spec.anomaly_radius_range.second, "");
  sub_pg->add_flag("--dark", pg.dark, "Dark-lesion mode (LiTS-like)");
  sub_pg->callback([&] {
    pg.brightness_set = ab->count() > 0;
    cmd_phantom_gen(pg);
  });

  TrainArgs tr;
  auto* sub_tr = app.add_subcommand("train", "Run the two-stage cycle training");
  sub_tr->add_option("--config", tr.config_path, "Run config JSON")->required();
  std::string tr_out;
  uint64_t tr_seed = 0;
  int tr_s1 = 0, tr_s2 = 0, tr_ed = 0, tr_em = 0, tr_bs = 0;
  double tr_lr = 0.0;
  auto* o_out = sub_tr->add_option("--out", tr_out, "Run directory override");
  auto* o_seed = sub_tr->add_option("--seed", tr_seed, "Seed override");
  auto* o_s1 = sub_tr->add_option("--stage1-cycles", tr_s1, "");
  auto* o_s2 = sub_tr->add_option("--stage2-cycles", tr_s2, "");
  auto* o_ed = sub_tr->add_option("--epochs-d", tr_ed, "Epochs per D step");
  auto* o_em = sub_tr->add_option("--epochs-m", tr_em, "Epochs per M step");
  auto* o_bs = sub_tr->add_option("--batch-size", tr_bs, "");
  auto* o_lr = sub_tr->add_option("--learning-rate", tr_lr, "");
  sub_tr->callback([&] {
    if (o_out->count()) tr.out_dir = tr_out;
    if (o_seed->count()) tr.seed = tr_seed;
    if (o_s1->count()) tr.stage1 = tr_s1;
    if (o_s2->count()) tr.stage2 = tr_s2;
    if (o_ed->count()) tr.epochs_d = tr_ed;
    if (o_em->count()) tr.epochs_m = tr_em;
    if (o_bs->count()) tr.batch = tr_bs;
    if (o_lr->count()) tr.lr = tr_lr;
    cmd_train(tr);
  });

  SegmentArgs sg;
  auto* sub_sg = app.add_subcommand("segment", "Histogram thresholding of reconstructions");
  sub_sg->add_option("--checkpoint", sg.checkpoint, "Model checkpoint")->required();
  sub_sg->add_option("--manifest", sg.manifests, "Input manifest(s)")->required();
  sub_sg->add_option("--roi", sg.roi_manifests, "ROI mask manifest(s)");
  sub_sg->add_option("--out", sg.out_dir, "Output directory")->required();
  sub_sg->add_option("--polarity", sg.polarity, "bright | dark");
  int sg_threshold = -1;
  auto* o_thr = sub_sg->add_option("--threshold", sg_threshold, "Threshold override 0-255");
  sub_sg->add_flag("--roi-required", sg.roi_required, "Fail when no ROI is supplied");
  sub_sg->add_flag("--per-subject", sg.per_subject, "Per-subject thresholds");
  sub_sg->add_option("--postproc", sg.postproc, "none | open | gate");
  sub_sg->add_option("--se-size", sg.se_size, "Opening structuring element size");
  sub_sg->add_option("--gate-manifest", sg.gate_manifests, "Gate image manifest(s)");
  sub_sg->add_option("--gate-threshold", sg.gate_threshold, "Gate intensity 0-255");
  sub_sg->add_flag("--emit-both-peak-masks", sg.emit_both_peak_masks,
                   "Also write leftmost/rightmost-peak candidate masks");
  sub_sg->add_option("--batch-size", sg.batch_size, "");
  sub_sg->add_option("--smooth-window", sg.peak_params.smooth_window, "Histogram smoothing");
  sub_sg->add_option("--min-prominence", sg.peak_params.min_prominence_fraction, "");
  sub_sg->add_option("--min-separation", sg.peak_params.min_separation, "");
  sub_sg->callback([&] {
    if (o_thr->count()) sg.threshold = sg_threshold;
    cmd_segment(sg);
  });

  EvalArgs ev;
  auto* sub_ev = app.add_subcommand("eval", "Dice scoring against ground truth");
  sub_ev->add_option("--pred", ev.pred_dir, "Prediction mask directory")->required();
  sub_ev->add_option("--gt", ev.gt_manifests, "Ground-truth manifest(s)")->required();
  sub_ev->add_option("--level", ev.level, "subject | slice");
  sub_ev->add_option("--out", ev.out_dir, "Output directory (default: pred dir)");
  sub_ev->callback([&] { cmd_eval(ev); });

  HistArgs hi;
  auto* sub_hi = app.add_subcommand("hist", "Pooled intensity histogram of slices");
  sub_hi->add_option("--manifest", hi.manifests, "Input manifest(s)")->required();
  sub_hi->add_option("--roi", hi.roi_manifests, "ROI mask manifest(s)");
  sub_hi->add_option("--checkpoint", hi.checkpoint,
                     "Histogram the model reconstructions instead of the raw slices");
  sub_hi->add_flag("--invert", hi.invert, "Invert intensities before binning");
  sub_hi->add_option("--out-csv", hi.out_csv, "Output CSV")->required();
  sub_hi->add_option("--out-plot", hi.out_plot, "Output plot PNG");
  sub_hi->add_option("--batch-size", hi.batch_size, "");
  sub_hi->callback([&] { cmd_hist(hi); });

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace ascnet::cli
