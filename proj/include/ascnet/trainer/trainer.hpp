#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ascnet/datapipe/balance.hpp"
#include "ascnet/losses/losses.hpp"
#include "ascnet/netgraph/model.hpp"
#include "ascnet/segmenter/peaks.hpp"
#include "ascnet/trainer/adam.hpp"

namespace ascnet::trainer {

struct TrainConfig {
  int stage1_cycles = 2;
  int stage2_cycles = 1;
  int epochs_per_d_step = 1;
  int epochs_per_m_step = 1;
  int batch_size = 8;
  double learning_rate = 5e-5;
  std::array<double, 3> loss_weights = {1.0, 1.0, 1.0};  // fence, disjoincy, recon
  uint64_t seed = 0;
  bool early_stop_on_peaks = false;
  // Recompute the stage-2 reference augmentation at every stage-2 cycle
  // instead of once at the stage boundary.
  bool refresh_augment_each_cycle = false;
  int eval_subset_size = 64;
  segmenter::PeakParams peak_params;
  int min_peak_count = 3;

  void validate() const;
};

// One losses.jsonl line.
struct EpochRecord {
  int stage = 1;
  int cycle = 0;  // global cycle index, 0-based
  std::string phase;  // "D" or "M"
  int epoch = 0;
  losses::LossReport report;
};

struct Optimizers {
  Adam main_opt;
  Adam disc_opt;
};

// Fence-branch outputs I_fc over a slice set, inference mode, in stable
// order (used for discriminator fakes and reference augmentation).
std::vector<datapipe::Slice> fence_outputs(netgraph::ModelState& state,
                                           const std::vector<datapipe::Slice>& inputs,
                                           int batch_size);

// Reduced reconstructions I_ro over a slice set, inference mode.
std::vector<datapipe::Slice> reconstruction_outputs(netgraph::ModelState& state,
                                                    const std::vector<datapipe::Slice>& inputs,
                                                    int batch_size);

// One epoch over the shuffled fake/real union in mini-batches; only the
// discriminator weights move.
losses::LossReport train_discriminator_step(netgraph::ModelState& state,
                                            const std::vector<datapipe::Slice>& fakes,
                                            const std::vector<datapipe::Slice>& reals,
                                            Adam& opt, const TrainConfig& cfg, uint64_t seed);

// One epoch over the inputs minimizing the weighted sum of the fence,
// disjoincy and reconstruction losses with the discriminator frozen.
losses::LossReport train_main_step(netgraph::ModelState& state,
                                   const std::vector<datapipe::Slice>& inputs, Adam& opt,
                                   const TrainConfig& cfg, uint64_t seed);

// R_d followed by I_fc(R_d); exactly doubles the set.
datapipe::ReferenceSet augment_reference(netgraph::ModelState& state,
                                         const datapipe::ReferenceSet& reference,
                                         int batch_size);

// Peak-separation termination: pooled I_ro histogram over a fixed evaluation
// subset of the inputs; true when at least min_peak_count separated peaks
// are detected.
std::pair<bool, segmenter::Histogram256> check_termination(
    netgraph::ModelState& state, const std::vector<datapipe::Slice>& inputs,
    const TrainConfig& cfg);

bool peaks_satisfy_termination(const segmenter::Histogram256& h,
                               const segmenter::PeakParams& params, int min_peak_count);

// Full two-stage cycle schedule. When run_dir is non-empty, writes
// config.json, ckpt_cycle<k>.bin, losses.jsonl and histogram_cycle<k>.csv
// there. Optimizer state persists across phases; pass opts to inspect or
// continue it.
std::vector<EpochRecord> run_training(netgraph::ModelState& state,
                                      const std::vector<datapipe::Slice>& inputs,
                                      const datapipe::ReferenceSet& reference,
                                      const TrainConfig& cfg, const std::string& run_dir = "",
                                      Optimizers* opts = nullptr);

// Checkpoint bundle: model weights, batchnorm statistics, config echo,
// training position, and both optimizers' moments.
void save_checkpoint(const std::string& path, netgraph::ModelState& state,
                     const Optimizers* opts);
netgraph::ModelState load_checkpoint(const std::string& path, Optimizers* opts);

}  // namespace ascnet::trainer
