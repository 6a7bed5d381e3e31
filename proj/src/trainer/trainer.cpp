#include "ascnet/trainer/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ascnet/configio.hpp"
#include "ascnet/core/error.hpp"
#include "ascnet/kernels/kernels.hpp"
#include "ascnet/netgraph/checkpoint.hpp"
#include "ascnet/segmenter/histogram.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ascnet::trainer {

namespace k = ascnet::kernels;
using datapipe::ReferenceSet;
using datapipe::Slice;
using losses::LossReport;
using netgraph::ModelState;

void TrainConfig::validate() const {
  std::string problems;
  auto complain = [&](const std::string& msg) {
    if (!problems.empty()) problems += "; ";
    problems += msg;
  };
  if (stage1_cycles < 0 || stage2_cycles < 0) complain("cycle counts must be >= 0");
  if (epochs_per_d_step < 1 || epochs_per_m_step < 1) complain("epochs per step must be >= 1");
  if (batch_size < 1) complain("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) complain("learning_rate must be > 0");
  for (double w : loss_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      complain("loss weights must be finite and >= 0");
      break;
    }
  }
  if (eval_subset_size < 1) complain("eval_subset_size must be >= 1");
  if (min_peak_count < 1) complain("min_peak_count must be >= 1");
  if (peak_params.smooth_window < 1 || peak_params.smooth_window % 2 == 0) {
    complain("peak smooth window must be odd and positive");
  }
  if (!problems.empty()) throw config_error("invalid train config: " + problems);
}

namespace {

Tensor gather_batch(const std::vector<const Slice*>& slices, size_t lo, size_t hi) {
  std::vector<const Slice*> ptrs(slices.begin() + lo, slices.begin() + hi);
  return netgraph::slices_to_batch(ptrs);
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::vector<Slice> fence_outputs(ModelState& state, const std::vector<Slice>& inputs,
                                 int batch_size) {
  std::vector<Slice> out;
  out.reserve(inputs.size());
  for (size_t lo = 0; lo < inputs.size(); lo += batch_size) {
    size_t hi = std::min(inputs.size(), lo + batch_size);
    std::vector<const Slice*> ptrs;
    for (size_t i = lo; i < hi; ++i) ptrs.push_back(&inputs[i]);
    auto fwd = netgraph::forward_main(state, netgraph::slices_to_batch(ptrs), false, 0);
    for (size_t i = lo; i < hi; ++i) {
      out.push_back(netgraph::batch_to_slice(fwd.i_fc, static_cast<int>(i - lo),
                                             inputs[i].subject_id, inputs[i].index));
    }
  }
  return out;
}

std::vector<Slice> reconstruction_outputs(ModelState& state, const std::vector<Slice>& inputs,
                                          int batch_size) {
  std::vector<Slice> out;
  out.reserve(inputs.size());
  for (size_t lo = 0; lo < inputs.size(); lo += batch_size) {
    size_t hi = std::min(inputs.size(), lo + batch_size);
    std::vector<const Slice*> ptrs;
    for (size_t i = lo; i < hi; ++i) ptrs.push_back(&inputs[i]);
    auto fwd = netgraph::forward_main(state, netgraph::slices_to_batch(ptrs), false, 0);
    for (size_t i = lo; i < hi; ++i) {
      out.push_back(netgraph::batch_to_slice(fwd.i_ro, static_cast<int>(i - lo),
                                             inputs[i].subject_id, inputs[i].index));
    }
  }
  return out;
}

LossReport train_discriminator_step(ModelState& state, const std::vector<Slice>& fakes,
                                    const std::vector<Slice>& reals, Adam& opt,
                                    const TrainConfig& cfg, uint64_t seed) {
  if (fakes.empty() || reals.empty()) {
    throw config_error("train_discriminator_step: both fake and real sets must be non-empty");
  }

  struct Item {
    const Slice* slice;
    double target;
  };
  std::vector<Item> items;
  items.reserve(fakes.size() + reals.size());
  for (const auto& s : fakes) items.push_back({&s, -1.0});
  for (const auto& s : reals) items.push_back({&s, 1.0});
  Rng rng(mix_seed(seed, 0xd5f1eULL));
  rng.shuffle(items);

  double abs_sum = 0.0;
  size_t scored = 0;
  size_t batch_index = 0;
  for (size_t lo = 0; lo < items.size(); lo += cfg.batch_size, ++batch_index) {
    size_t hi = std::min(items.size(), lo + static_cast<size_t>(cfg.batch_size));
    std::vector<const Slice*> ptrs;
    std::vector<double> targets;
    for (size_t i = lo; i < hi; ++i) {
      ptrs.push_back(items[i].slice);
      targets.push_back(items[i].target);
    }
    Tensor batch = netgraph::slices_to_batch(ptrs);
    netgraph::DiscTape tape;
    std::vector<double> scores = netgraph::forward_discriminator(
        state, batch, true, mix_seed(seed, 0xd15cba7cULL, batch_index), &tape);

    double batch_abs = 0.0;
    std::vector<double> g(scores.size());
    double inv = 1.0 / static_cast<double>(scores.size());
    for (size_t i = 0; i < scores.size(); ++i) {
      double diff = scores[i] - targets[i];
      batch_abs += std::abs(diff);
      g[i] = sign(diff) * inv;
    }
    if (!std::isfinite(batch_abs)) {
      throw numerical_error("non-finite discriminator loss at batch " +
                            std::to_string(batch_index));
    }
    abs_sum += batch_abs;
    scored += scores.size();

    netgraph::zero_disc_grads(state);
    netgraph::backward_discriminator(state, tape, g, true, nullptr);
    opt.step(netgraph::disc_params(state));
  }

  LossReport report;
  report.loss_discriminator = abs_sum / static_cast<double>(scored);
  report.n = static_cast<int>(fakes.size());
  report.m = static_cast<int>(reals.size());
  return report;
}

LossReport train_main_step(ModelState& state, const std::vector<Slice>& inputs, Adam& opt,
                           const TrainConfig& cfg, uint64_t seed) {
  if (inputs.empty()) throw config_error("train_main_step: input set is empty");

  std::vector<const Slice*> order;
  order.reserve(inputs.size());
  for (const auto& s : inputs) order.push_back(&s);
  Rng rng(mix_seed(seed, 0x3a17ULL));
  rng.shuffle(order);

  const double w_fence = cfg.loss_weights[0];
  const double w_dis = cfg.loss_weights[1];
  const double w_recon = cfg.loss_weights[2];
  const auto& ops = k::ops();

  double fence_abs = 0.0;
  double dice_weighted = 0.0;
  double recon_sq = 0.0;
  size_t n_seen = 0, px_seen = 0;
  size_t batch_index = 0;

  for (size_t lo = 0; lo < order.size(); lo += cfg.batch_size, ++batch_index) {
    size_t hi = std::min(order.size(), lo + static_cast<size_t>(cfg.batch_size));
    Tensor batch = gather_batch(order, lo, hi);

    netgraph::MainTape tape;
    auto fwd = netgraph::forward_main(state, batch, true,
                                      mix_seed(seed, 0x3a17f0ULL, batch_index), &tape);
    netgraph::DiscTape dtape;
    std::vector<double> scores = netgraph::forward_discriminator(state, fwd.i_fc, false, 0,
                                                                 &dtape);

    double l_fence = losses::loss_fence(scores);
    double l_dis = losses::loss_disjoincy(fwd.i_fc, fwd.i_wc);
    double l_recon = losses::loss_reconstruction(batch, fwd.i_ro);
    double total = w_fence * l_fence + w_dis * l_dis + w_recon * l_recon;
    if (!std::isfinite(total)) {
      throw numerical_error("non-finite main loss at batch " + std::to_string(batch_index));
    }

    for (double s : scores) fence_abs += std::abs(s - 1.0);
    dice_weighted += l_dis * static_cast<double>(hi - lo);
    recon_sq += l_recon * static_cast<double>(batch.size());
    n_seen += hi - lo;
    px_seen += batch.size();

    // Fence objective: gradient flows through the frozen discriminator back
    // to I_fc.
    std::vector<double> g_scores = losses::loss_fence_grad(scores);
    for (double& gsc : g_scores) gsc *= w_fence;
    Tensor g_fc_from_d;
    netgraph::backward_discriminator(state, dtape, g_scores, false, &g_fc_from_d);

    Tensor g_fc_dice, g_wc_dice;
    losses::loss_disjoincy_grad(fwd.i_fc, fwd.i_wc, g_fc_dice, g_wc_dice);
    ops.scale(g_fc_dice.data(), w_dis, g_fc_dice.size());
    ops.scale(g_wc_dice.data(), w_dis, g_wc_dice.size());

    Tensor g_ro = losses::loss_reconstruction_grad(batch, fwd.i_ro);
    ops.scale(g_ro.data(), w_recon, g_ro.size());

    ops.add(g_fc_from_d.data(), g_fc_from_d.data(), g_fc_dice.data(), g_fc_from_d.size());

    netgraph::zero_main_grads(state);
    netgraph::backward_main(state, tape, g_fc_from_d, g_wc_dice, g_ro);
    opt.step(netgraph::main_params(state));
    state.step_counter += 1;
  }

  LossReport report;
  report.loss_fence = fence_abs / static_cast<double>(n_seen);
  report.loss_disjoincy = dice_weighted / static_cast<double>(n_seen);
  report.loss_reconstruction = recon_sq / static_cast<double>(px_seen);
  report.n = static_cast<int>(inputs.size());
  report.m = 0;
  return report;
}

ReferenceSet augment_reference(ModelState& state, const ReferenceSet& reference,
                               int batch_size) {
  ReferenceSet out;
  out.slices = reference.slices;
  std::vector<Slice> generated = fence_outputs(state, reference.slices, batch_size);
  out.slices.insert(out.slices.end(), generated.begin(), generated.end());
  return out;
}

bool peaks_satisfy_termination(const segmenter::Histogram256& h,
                               const segmenter::PeakParams& params, int min_peak_count) {
  if (h.total == 0) return false;
  return static_cast<int>(segmenter::detect_peaks(h, params).size()) >= min_peak_count;
}

std::pair<bool, segmenter::Histogram256> check_termination(
    ModelState& state, const std::vector<Slice>& inputs, const TrainConfig& cfg) {
  size_t subset = std::min(inputs.size(), static_cast<size_t>(cfg.eval_subset_size));
  std::vector<Slice> eval_set(inputs.begin(), inputs.begin() + subset);
  std::vector<Slice> recon = reconstruction_outputs(state, eval_set, cfg.batch_size);
  segmenter::Histogram256 h = segmenter::compute_histogram(recon);
  return {peaks_satisfy_termination(h, cfg.peak_params, cfg.min_peak_count), h};
}

namespace {

json record_to_json(const EpochRecord& r) {
  return json{{"stage", r.stage},
              {"cycle", r.cycle},
              {"phase", r.phase},
              {"epoch", r.epoch},
              {"loss_fence", r.report.loss_fence},
              {"loss_disjoincy", r.report.loss_disjoincy},
              {"loss_reconstruction", r.report.loss_reconstruction},
              {"loss_discriminator", r.report.loss_discriminator},
              {"n", r.report.n},
              {"m", r.report.m}};
}

std::string phase_context(int stage, int cycle, const char* phase, int epoch) {
  return "stage " + std::to_string(stage) + " cycle " + std::to_string(cycle) + " phase " +
         phase + " epoch " + std::to_string(epoch);
}

}  // namespace

void save_checkpoint(const std::string& path, ModelState& state, const Optimizers* opts) {
  std::map<std::string, Tensor> extra;
  if (opts != nullptr) {
    auto pack = [&](const Adam& opt, const std::string& prefix) {
      for (const auto& [name, slot] : opt.slots()) {
        extra[prefix + ".m." + name] = slot.m;
        extra[prefix + ".v." + name] = slot.v;
      }
      Tensor t(1, 1, 1, 1);
      t[0] = static_cast<double>(opt.step_count());
      extra[prefix + ".t"] = t;
    };
    pack(opts->main_opt, "opt.main");
    pack(opts->disc_opt, "opt.disc");
  }
  netgraph::save_model_bundle(path, state, extra);
}

ModelState load_checkpoint(const std::string& path, Optimizers* opts) {
  std::map<std::string, Tensor> extra;
  ModelState state = netgraph::load_model_bundle(path, opts != nullptr ? &extra : nullptr);
  if (opts != nullptr) {
    auto unpack = [&](Adam& opt, const std::string& prefix) {
      for (auto& [name, tensor] : extra) {
        if (name.rfind(prefix + ".m.", 0) == 0) {
          opt.slots()[name.substr(prefix.size() + 3)].m = tensor;
        } else if (name.rfind(prefix + ".v.", 0) == 0) {
          opt.slots()[name.substr(prefix.size() + 3)].v = tensor;
        } else if (name == prefix + ".t") {
          opt.set_step_count(static_cast<int64_t>(tensor[0]));
        }
      }
    };
    unpack(opts->main_opt, "opt.main");
    unpack(opts->disc_opt, "opt.disc");
  }
  return state;
}

std::vector<EpochRecord> run_training(ModelState& state, const std::vector<Slice>& inputs,
                                      const ReferenceSet& reference, const TrainConfig& cfg,
                                      const std::string& run_dir, Optimizers* opts) {
  cfg.validate();
  if (inputs.empty() || reference.slices.empty()) {
    throw config_error("run_training: input and reference sets must be non-empty");
  }
  if (inputs.size() != reference.slices.size()) {
    throw config_error("run_training: sets are not balanced (" + std::to_string(inputs.size()) +
                       " inputs vs " + std::to_string(reference.slices.size()) +
                       " reference); apply balance_sets first");
  }

  Optimizers local;
  Optimizers& o = opts != nullptr ? *opts : local;
  o.main_opt.set_learning_rate(cfg.learning_rate);
  o.disc_opt.set_learning_rate(cfg.learning_rate);

  const bool files = !run_dir.empty();
  std::ofstream losses_out;
  if (files) {
    std::error_code ec;
    fs::create_directories(run_dir, ec);
    json echo = {{"network", state.config}, {"train", cfg}};
    std::ofstream cfg_out(run_dir + "/config.json");
    if (!cfg_out) throw io_error("cannot write run config: " + run_dir + "/config.json");
    cfg_out << echo.dump(2) << "\n";
    save_checkpoint(run_dir + "/ckpt_cycle0.bin", state, &o);
    losses_out.open(run_dir + "/losses.jsonl");
    if (!losses_out) throw io_error("cannot write loss log: " + run_dir + "/losses.jsonl");
  }

  std::vector<EpochRecord> history;
  ReferenceSet active = reference;
  bool augmented = false;
  const int total_cycles = cfg.stage1_cycles + cfg.stage2_cycles;

  for (int cycle = 0; cycle < total_cycles; ++cycle) {
    int stage = cycle < cfg.stage1_cycles ? 1 : 2;
    if (stage == 2 && (!augmented || cfg.refresh_augment_each_cycle)) {
      active = augment_reference(state, reference, cfg.batch_size);
      augmented = true;
    }
    state.stage = stage;
    state.cycle_index = cycle;

    // D-phase: the main module is frozen, so the fakes are fixed for the
    // whole phase.
    std::vector<Slice> fakes = fence_outputs(state, inputs, cfg.batch_size);
    for (int e = 0; e < cfg.epochs_per_d_step; ++e) {
      LossReport rep;
      try {
        rep = train_discriminator_step(state, fakes, active.slices, o.disc_opt, cfg,
                                       mix_seed(cfg.seed, 0xd0ULL, cycle, e));
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::numerical) {
          throw numerical_error(phase_context(stage, cycle, "D", e) + ": " + err.what());
        }
        throw;
      }
      EpochRecord record{stage, cycle, "D", e, rep};
      history.push_back(record);
      if (files) losses_out << record_to_json(record).dump() << "\n";
    }

    for (int e = 0; e < cfg.epochs_per_m_step; ++e) {
      LossReport rep;
      try {
        rep = train_main_step(state, inputs, o.main_opt, cfg,
                              mix_seed(cfg.seed, 0x3aULL, cycle, e));
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::numerical) {
          throw numerical_error(phase_context(stage, cycle, "M", e) + ": " + err.what());
        }
        throw;
      }
      EpochRecord record{stage, cycle, "M", e, rep};
      history.push_back(record);
      if (files) losses_out << record_to_json(record).dump() << "\n";
    }

    auto [stop, hist] = check_termination(state, inputs, cfg);
    if (files) {
      save_checkpoint(run_dir + "/ckpt_cycle" + std::to_string(cycle + 1) + ".bin", state, &o);
      segmenter::write_histogram_csv(
          run_dir + "/histogram_cycle" + std::to_string(cycle + 1) + ".csv", hist);
    }
    if (cfg.early_stop_on_peaks && stop) break;
  }
  return history;
}

}  // namespace ascnet::trainer
