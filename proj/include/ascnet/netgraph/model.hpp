#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ascnet/core/tensor.hpp"
#include "ascnet/datapipe/slice.hpp"
#include "ascnet/netgraph/config.hpp"
#include "ascnet/netgraph/layers.hpp"

namespace ascnet::netgraph {

// conv -> batchnorm -> ReLU
struct ConvBnRelu {
  Conv2d conv;
  BatchNorm2d bn;

  struct Tape {
    Tensor x;     // conv input
    BnTape bn;    // holds the conv output
    Tensor out;   // relu output (mask source)
  };

  void init(int cin, int cout, Rng& rng);
  Tensor forward(const Tensor& x, bool training, Tape* tape, const std::string& where);
  Tensor backward(const Tape& tape, const Tensor& gy, bool accumulate_params, bool want_gx);
  void zero_grad();
};

// The shared trunk: four (or config.levels()) blocks of two ConvBnRelu
// followed by 2x2 max pooling and dropout, then a two-layer transition.
struct Encoder {
  std::vector<ConvBnRelu> block1, block2;  // per level
  ConvBnRelu trans1, trans2;
  double dropout_rate = 0.3;

  struct Tape {
    struct Level {
      ConvBnRelu::Tape t1, t2;  // t2.out is the skip source
      MaxPoolTape pool;
      DropoutTape drop;
      int channels = 0;
    };
    std::vector<Level> levels;
    ConvBnRelu::Tape tr1, tr2;
  };

  void init(int in_channels, const NetworkConfig& cfg, Rng& rng);
  Tensor forward(const Tensor& x, bool training, Rng& dropout_rng, Tape* tape,
                 const std::string& where);
  // g_skips, when non-null, carries per-level gradient contributions into the
  // skip outputs (deepest-last order matching `levels`).
  Tensor backward(const Tape& tape, const Tensor& g_out,
                  const std::vector<Tensor>* g_skips, bool accumulate_params,
                  bool want_gx);
  void zero_grad();
};

// Mirror decoder: transposed-conv upsampling, optional skip concatenation,
// two ConvBnRelu per level, then a 1x1 head with sigmoid.
struct Decoder {
  struct Level {
    ConvTranspose2d up;
    ConvBnRelu c1, c2;
  };
  std::vector<Level> levels;  // deepest first
  Conv2d head;                // 1x1 -> 1 channel
  bool use_skips = true;

  struct Tape {
    struct Level {
      Tensor up_in;
      ConvBnRelu::Tape t1, t2;
    };
    std::vector<Level> levels;
    Tensor head_in;
    Tensor out;  // sigmoid output
  };

  void init(const NetworkConfig& cfg, Rng& rng);
  Tensor forward(const Tensor& bottom, const std::vector<const Tensor*>& skips,
                 bool training, Tape* tape, const std::string& where);
  // Returns gradient w.r.t. the bottom input; accumulates skip gradients
  // into g_skips (indexed like Encoder::Tape::levels).
  Tensor backward(const Tape& tape, const Tensor& g_out, std::vector<Tensor>* g_skips,
                  bool accumulate_params);
  void zero_grad();
};

struct MainModule {
  Encoder enc;
  Decoder fence, wild;
  Conv2d recon;  // 1x1 over [I_fc, I_wc]
};

struct Discriminator {
  Encoder trunk;
  Dense dense;
};

// All learnable state plus normalization statistics and training position.
struct ModelState {
  NetworkConfig config;
  MainModule main;
  Discriminator disc;
  int64_t step_counter = 0;
  int stage = 1;
  int cycle_index = 0;
};

struct ForwardOutputs {
  Tensor i_fc, i_wc, i_ro;  // [N, 1, H, W], all sigmoid-bounded
};

struct MainTape {
  Encoder::Tape enc;
  Decoder::Tape fence, wild;
  Tensor recon_in;   // [N, 2, H, W]
  Tensor i_ro;       // sigmoid output
};

struct DiscTape {
  Encoder::Tape trunk;
  Tensor dense_in;
  std::vector<double> scores;  // post-tanh
};

ModelState init_model(const NetworkConfig& config, uint64_t seed);

// Runs E, the two decoders and the reconstructor. Training mode activates
// dropout and batch statistics (and updates running statistics); seed drives
// the dropout masks.
ForwardOutputs forward_main(ModelState& state, const Tensor& batch, bool training,
                            uint64_t seed, MainTape* tape = nullptr);

// Propagates gradients for the three outputs; parameter gradients accumulate
// into the main module only.
void backward_main(ModelState& state, const MainTape& tape, const Tensor& g_ifc,
                   const Tensor& g_iwc, const Tensor& g_iro);

// One tanh-bounded score per slice.
std::vector<double> forward_discriminator(ModelState& state, const Tensor& batch,
                                          bool training = false, uint64_t seed = 0,
                                          DiscTape* tape = nullptr);

// When accumulate_param_grads is false the discriminator is frozen and only
// the input gradient (for the fence branch) is produced.
void backward_discriminator(ModelState& state, const DiscTape& tape,
                            const std::vector<double>& g_scores,
                            bool accumulate_param_grads, Tensor* g_input);

void zero_main_grads(ModelState& state);
void zero_disc_grads(ModelState& state);

struct ParamRef {
  std::string name;
  Tensor* value;
  Tensor* grad;
};

struct StatRef {
  std::string name;
  Tensor* value;
};

std::vector<ParamRef> main_params(ModelState& state);
std::vector<ParamRef> disc_params(ModelState& state);
std::vector<StatRef> batchnorm_stats(ModelState& state);

// [N,1,H,W] batch from slices (all must share one shape).
Tensor slices_to_batch(const std::vector<datapipe::Slice>& slices);
Tensor slices_to_batch(const std::vector<const datapipe::Slice*>& slices);
datapipe::Slice batch_to_slice(const Tensor& batch, int n, const std::string& subject_id,
                               int index);

}  // namespace ascnet::netgraph
