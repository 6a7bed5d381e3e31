#include "ascnet/netgraph/model.hpp"

#include <cmath>

#include "ascnet/core/error.hpp"
#include "ascnet/kernels/kernels.hpp"

namespace ascnet::netgraph {

namespace k = ascnet::kernels;

void NetworkConfig::validate() const {
  std::string problems;
  auto complain = [&](const std::string& msg) {
    if (!problems.empty()) problems += "; ";
    problems += msg;
  };
  if (encoder_channels.empty()) complain("encoder_channels is empty");
  for (size_t i = 0; i < encoder_channels.size(); ++i) {
    if (encoder_channels[i] < 1) complain("encoder channel count must be >= 1");
    if (i > 0 && encoder_channels[i] <= encoder_channels[i - 1]) {
      complain("encoder_channels must be strictly increasing");
      break;
    }
  }
  if (transition_channels < 1) complain("transition_channels must be >= 1");
  if (conv_kernel != 3) complain("conv_kernel must be 3");
  if (pool_kernel != 2) complain("pool_kernel must be 2");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) complain("dropout_rate must be in [0,1)");
  int div = 1 << levels();
  if (input_h <= 0 || input_w <= 0) {
    complain("input size must be positive");
  } else if (input_h % div != 0 || input_w % div != 0) {
    complain("input size must be divisible by 2^levels = " + std::to_string(div));
  }
  if (!problems.empty()) throw config_error("invalid network config: " + problems);
}

// ---------------------------------------------------------------------------
// ConvBnRelu

void ConvBnRelu::init(int cin, int cout, Rng& rng) {
  conv.init(cin, cout, 3, rng);
  bn.init(cout);
}

void ConvBnRelu::zero_grad() {
  conv.zero_grad();
  bn.zero_grad();
}

Tensor ConvBnRelu::forward(const Tensor& x, bool training, Tape* tape,
                           const std::string& where) {
  Tensor pre = conv.forward(x);
  Tensor normed = bn.forward(pre, training, tape != nullptr ? &tape->bn : nullptr);
  Tensor out(normed.n(), normed.c(), normed.h(), normed.w());
  k::ops().relu(out.data(), normed.data(), out.size());
  check_finite(out, where);
  if (tape != nullptr) {
    tape->x = x;
    tape->out = out;
  }
  return out;
}

Tensor ConvBnRelu::backward(const Tape& tape, const Tensor& gy, bool accumulate_params,
                            bool want_gx) {
  Tensor g_bn(gy.n(), gy.c(), gy.h(), gy.w());
  k::ops().relu_backward(g_bn.data(), gy.data(), tape.out.data(), gy.size());
  Tensor g_pre = bn.backward(g_bn, tape.bn, accumulate_params);
  return conv.backward(tape.x, g_pre, accumulate_params, want_gx);
}

// ---------------------------------------------------------------------------
// Encoder

void Encoder::init(int in_channels, const NetworkConfig& cfg, Rng& rng) {
  dropout_rate = cfg.dropout_rate;
  int levels = cfg.levels();
  block1.resize(levels);
  block2.resize(levels);
  for (int i = 0; i < levels; ++i) {
    int cin = i == 0 ? in_channels : cfg.encoder_channels[i - 1];
    block1[i].init(cin, cfg.encoder_channels[i], rng);
    block2[i].init(cfg.encoder_channels[i], cfg.encoder_channels[i], rng);
  }
  trans1.init(cfg.encoder_channels.back(), cfg.transition_channels, rng);
  trans2.init(cfg.transition_channels, cfg.transition_channels, rng);
}

void Encoder::zero_grad() {
  for (auto& b : block1) b.zero_grad();
  for (auto& b : block2) b.zero_grad();
  trans1.zero_grad();
  trans2.zero_grad();
}

Tensor Encoder::forward(const Tensor& x, bool training, Rng& dropout_rng, Tape* tape,
                        const std::string& where) {
  int levels = static_cast<int>(block1.size());
  if (tape != nullptr) tape->levels.resize(levels);
  Tensor cur = x;
  for (int i = 0; i < levels; ++i) {
    std::string lvl = where + ".block" + std::to_string(i + 1);
    Tape::Level* lt = tape != nullptr ? &tape->levels[i] : nullptr;
    cur = block1[i].forward(cur, training, lt != nullptr ? &lt->t1 : nullptr, lvl + ".conv1");
    cur = block2[i].forward(cur, training, lt != nullptr ? &lt->t2 : nullptr, lvl + ".conv2");
    if (lt != nullptr) lt->channels = cur.c();
    cur = maxpool2_forward(cur, lt != nullptr ? &lt->pool : nullptr);
    cur = dropout_forward(cur, dropout_rate, training, dropout_rng,
                          lt != nullptr ? &lt->drop : nullptr);
  }
  cur = trans1.forward(cur, training, tape != nullptr ? &tape->tr1 : nullptr,
                       where + ".transition.conv1");
  cur = trans2.forward(cur, training, tape != nullptr ? &tape->tr2 : nullptr,
                       where + ".transition.conv2");
  return cur;
}

Tensor Encoder::backward(const Tape& tape, const Tensor& g_out,
                         const std::vector<Tensor>* g_skips, bool accumulate_params,
                         bool want_gx) {
  Tensor g = trans2.backward(tape.tr2, g_out, accumulate_params, true);
  g = trans1.backward(tape.tr1, g, accumulate_params, true);
  int levels = static_cast<int>(block1.size());
  for (int i = levels - 1; i >= 0; --i) {
    const Tape::Level& lt = tape.levels[i];
    g = dropout_backward(g, lt.drop);
    g = maxpool2_backward(g, lt.pool, g.n(), lt.channels);
    if (g_skips != nullptr && !(*g_skips)[i].empty()) {
      k::ops().add(g.data(), g.data(), (*g_skips)[i].data(), g.size());
    }
    g = block2[i].backward(lt.t2, g, accumulate_params, true);
    bool need_gx = i > 0 || want_gx;
    g = block1[i].backward(lt.t1, g, accumulate_params, need_gx);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Decoder

void Decoder::init(const NetworkConfig& cfg, Rng& rng) {
  use_skips = cfg.skip_connections;
  int levels = cfg.levels();
  this->levels.resize(levels);
  for (int j = 0; j < levels; ++j) {
    int enc_level = levels - 1 - j;  // encoder level whose resolution we restore
    int cin_up = j == 0 ? cfg.transition_channels : cfg.encoder_channels[enc_level + 1];
    int cout = cfg.encoder_channels[enc_level];
    this->levels[j].up.init(cin_up, cout, rng);
    int cin_block = use_skips ? 2 * cout : cout;
    this->levels[j].c1.init(cin_block, cout, rng);
    this->levels[j].c2.init(cout, cout, rng);
  }
  head.init(cfg.encoder_channels.front(), 1, 1, rng);
}

void Decoder::zero_grad() {
  for (auto& l : levels) {
    l.up.zero_grad();
    l.c1.zero_grad();
    l.c2.zero_grad();
  }
  head.zero_grad();
}

Tensor Decoder::forward(const Tensor& bottom, const std::vector<const Tensor*>& skips,
                        bool training, Tape* tape, const std::string& where) {
  int n_levels = static_cast<int>(levels.size());
  if (tape != nullptr) tape->levels.resize(n_levels);
  Tensor cur = bottom;
  for (int j = 0; j < n_levels; ++j) {
    int enc_level = n_levels - 1 - j;
    std::string lvl = where + ".level" + std::to_string(j + 1);
    Tape::Level* lt = tape != nullptr ? &tape->levels[j] : nullptr;
    if (lt != nullptr) lt->up_in = cur;
    Tensor up = levels[j].up.forward(cur);
    check_finite(up, lvl + ".up");
    Tensor cat = use_skips ? concat_channels(up, *skips[enc_level]) : std::move(up);
    cur = levels[j].c1.forward(cat, training, lt != nullptr ? &lt->t1 : nullptr, lvl + ".conv1");
    cur = levels[j].c2.forward(cur, training, lt != nullptr ? &lt->t2 : nullptr, lvl + ".conv2");
  }
  if (tape != nullptr) tape->head_in = cur;
  Tensor out = sigmoid_forward(head.forward(cur));
  check_finite(out, where + ".head");
  if (tape != nullptr) tape->out = out;
  return out;
}

Tensor Decoder::backward(const Tape& tape, const Tensor& g_out, std::vector<Tensor>* g_skips,
                         bool accumulate_params) {
  Tensor g = sigmoid_backward(g_out, tape.out);
  g = head.backward(tape.head_in, g, accumulate_params, true);
  int n_levels = static_cast<int>(levels.size());
  for (int j = n_levels - 1; j >= 0; --j) {
    int enc_level = n_levels - 1 - j;
    const Tape::Level& lt = tape.levels[j];
    g = levels[j].c2.backward(lt.t2, g, accumulate_params, true);
    g = levels[j].c1.backward(lt.t1, g, accumulate_params, true);
    Tensor g_up;
    if (use_skips) {
      Tensor g_skip;
      split_channels(g, levels[j].up.cout, g_up, g_skip);
      if (g_skips != nullptr) {
        Tensor& slot = (*g_skips)[enc_level];
        if (slot.empty()) {
          slot = std::move(g_skip);
        } else {
          k::ops().add(slot.data(), slot.data(), g_skip.data(), slot.size());
        }
      }
    } else {
      g_up = std::move(g);
    }
    g = levels[j].up.backward(lt.up_in, g_up, accumulate_params, true);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Model assembly

ModelState init_model(const NetworkConfig& config, uint64_t seed) {
  config.validate();
  ModelState state;
  state.config = config;
  Rng rng(mix_seed(seed, 0x1417ULL));
  state.main.enc.init(1, config, rng);
  state.main.fence.init(config, rng);
  state.main.wild.init(config, rng);
  state.main.recon.init(2, 1, 1, rng);
  state.disc.trunk.init(1, config, rng);
  int down = 1 << config.levels();
  int dense_in = config.transition_channels * (config.input_h / down) * (config.input_w / down);
  state.disc.dense.init(dense_in, rng);
  return state;
}

namespace {

void validate_batch(const NetworkConfig& cfg, const Tensor& batch) {
  if (batch.n() < 1 || batch.c() != 1 || batch.h() != cfg.input_h || batch.w() != cfg.input_w) {
    throw config_error("batch shape mismatch: expected [N,1," + std::to_string(cfg.input_h) +
                       "," + std::to_string(cfg.input_w) + "], got [" +
                       std::to_string(batch.n()) + "," + std::to_string(batch.c()) + "," +
                       std::to_string(batch.h()) + "," + std::to_string(batch.w()) + "]");
  }
}

}  // namespace

ForwardOutputs forward_main(ModelState& state, const Tensor& batch, bool training,
                            uint64_t seed, MainTape* tape) {
  validate_batch(state.config, batch);
  MainTape local;
  MainTape& t = tape != nullptr ? *tape : local;

  Rng dropout_rng(mix_seed(seed, 0xd120ULL));
  Tensor bottom = state.main.enc.forward(batch, training, dropout_rng, &t.enc, "enc");

  std::vector<const Tensor*> skips;
  skips.reserve(t.enc.levels.size());
  for (const auto& lvl : t.enc.levels) skips.push_back(&lvl.t2.out);

  ForwardOutputs out;
  out.i_fc = state.main.fence.forward(bottom, skips, training, &t.fence, "fence");
  out.i_wc = state.main.wild.forward(bottom, skips, training, &t.wild, "wild");

  t.recon_in = concat_channels(out.i_fc, out.i_wc);
  out.i_ro = sigmoid_forward(state.main.recon.forward(t.recon_in));
  check_finite(out.i_ro, "recon");
  t.i_ro = out.i_ro;
  return out;
}

void backward_main(ModelState& state, const MainTape& tape, const Tensor& g_ifc,
                   const Tensor& g_iwc, const Tensor& g_iro) {
  const auto& ops = k::ops();

  Tensor g_ro_pre = sigmoid_backward(g_iro, tape.i_ro);
  Tensor g_cat = state.main.recon.backward(tape.recon_in, g_ro_pre, true, true);
  Tensor g_fc, g_wc;
  split_channels(g_cat, 1, g_fc, g_wc);
  ops.add(g_fc.data(), g_fc.data(), g_ifc.data(), g_fc.size());
  ops.add(g_wc.data(), g_wc.data(), g_iwc.data(), g_wc.size());

  std::vector<Tensor> g_skips(tape.enc.levels.size());
  Tensor g_bottom = state.main.fence.backward(tape.fence, g_fc, &g_skips, true);
  Tensor g_bottom_w = state.main.wild.backward(tape.wild, g_wc, &g_skips, true);
  ops.add(g_bottom.data(), g_bottom.data(), g_bottom_w.data(), g_bottom.size());

  state.main.enc.backward(tape.enc, g_bottom, &g_skips, true, false);
}

std::vector<double> forward_discriminator(ModelState& state, const Tensor& batch,
                                          bool training, uint64_t seed, DiscTape* tape) {
  validate_batch(state.config, batch);
  DiscTape local;
  DiscTape& t = tape != nullptr ? *tape : local;

  Rng dropout_rng(mix_seed(seed, 0xd15cULL));
  Tensor trunk_out = state.disc.trunk.forward(batch, training, dropout_rng, &t.trunk, "disc");
  t.dense_in = trunk_out;
  std::vector<double> raw = state.disc.dense.forward(trunk_out);
  for (double& s : raw) {
    s = tanh_scalar(s);
    if (!std::isfinite(s)) throw numerical_error("non-finite activation in disc.dense");
  }
  t.scores = raw;
  return raw;
}

void backward_discriminator(ModelState& state, const DiscTape& tape,
                            const std::vector<double>& g_scores,
                            bool accumulate_param_grads, Tensor* g_input) {
  std::vector<double> g_pre(g_scores.size());
  for (size_t i = 0; i < g_scores.size(); ++i) {
    g_pre[i] = g_scores[i] * (1.0 - tape.scores[i] * tape.scores[i]);
  }
  Tensor g_trunk = state.disc.dense.backward(tape.dense_in, g_pre, accumulate_param_grads, true);
  Tensor g_in = state.disc.trunk.backward(tape.trunk, g_trunk, nullptr, accumulate_param_grads,
                                          g_input != nullptr);
  if (g_input != nullptr) *g_input = std::move(g_in);
}

void zero_main_grads(ModelState& state) {
  state.main.enc.zero_grad();
  state.main.fence.zero_grad();
  state.main.wild.zero_grad();
  state.main.recon.zero_grad();
}

void zero_disc_grads(ModelState& state) {
  state.disc.trunk.zero_grad();
  state.disc.dense.zero_grad();
}

// ---------------------------------------------------------------------------
// Parameter visitation

namespace {

void add_conv(std::vector<ParamRef>& out, const std::string& name, Conv2d& c) {
  out.push_back({name + ".weight", &c.w, &c.gw});
  out.push_back({name + ".bias", &c.b, &c.gb});
}

void add_tconv(std::vector<ParamRef>& out, const std::string& name, ConvTranspose2d& c) {
  out.push_back({name + ".weight", &c.w, &c.gw});
  out.push_back({name + ".bias", &c.b, &c.gb});
}

void add_bn(std::vector<ParamRef>& out, const std::string& name, BatchNorm2d& bn) {
  out.push_back({name + ".gamma", &bn.gamma, &bn.ggamma});
  out.push_back({name + ".beta", &bn.beta, &bn.gbeta});
}

void add_cbr(std::vector<ParamRef>& out, const std::string& name, ConvBnRelu& cbr) {
  add_conv(out, name, cbr.conv);
  add_bn(out, name + ".bn", cbr.bn);
}

void add_encoder(std::vector<ParamRef>& out, const std::string& prefix, Encoder& enc) {
  for (size_t i = 0; i < enc.block1.size(); ++i) {
    std::string b = prefix + ".block" + std::to_string(i + 1);
    add_cbr(out, b + ".conv1", enc.block1[i]);
    add_cbr(out, b + ".conv2", enc.block2[i]);
  }
  add_cbr(out, prefix + ".transition.conv1", enc.trans1);
  add_cbr(out, prefix + ".transition.conv2", enc.trans2);
}

void add_decoder(std::vector<ParamRef>& out, const std::string& prefix, Decoder& dec) {
  for (size_t j = 0; j < dec.levels.size(); ++j) {
    std::string l = prefix + ".level" + std::to_string(j + 1);
    add_tconv(out, l + ".up", dec.levels[j].up);
    add_cbr(out, l + ".conv1", dec.levels[j].c1);
    add_cbr(out, l + ".conv2", dec.levels[j].c2);
  }
  add_conv(out, prefix + ".head", dec.head);
}

void add_bn_stats(std::vector<StatRef>& out, const std::string& name, BatchNorm2d& bn) {
  out.push_back({name + ".running_mean", &bn.running_mean});
  out.push_back({name + ".running_var", &bn.running_var});
}

void add_encoder_stats(std::vector<StatRef>& out, const std::string& prefix, Encoder& enc) {
  for (size_t i = 0; i < enc.block1.size(); ++i) {
    std::string b = prefix + ".block" + std::to_string(i + 1);
    add_bn_stats(out, b + ".conv1.bn", enc.block1[i].bn);
    add_bn_stats(out, b + ".conv2.bn", enc.block2[i].bn);
  }
  add_bn_stats(out, prefix + ".transition.conv1.bn", enc.trans1.bn);
  add_bn_stats(out, prefix + ".transition.conv2.bn", enc.trans2.bn);
}

void add_decoder_stats(std::vector<StatRef>& out, const std::string& prefix, Decoder& dec) {
  for (size_t j = 0; j < dec.levels.size(); ++j) {
    std::string l = prefix + ".level" + std::to_string(j + 1);
    add_bn_stats(out, l + ".conv1.bn", dec.levels[j].c1.bn);
    add_bn_stats(out, l + ".conv2.bn", dec.levels[j].c2.bn);
  }
}

}  // namespace

std::vector<ParamRef> main_params(ModelState& state) {
  std::vector<ParamRef> out;
  add_encoder(out, "enc", state.main.enc);
  add_decoder(out, "fence", state.main.fence);
  add_decoder(out, "wild", state.main.wild);
  add_conv(out, "recon", state.main.recon);
  return out;
}

std::vector<ParamRef> disc_params(ModelState& state) {
  std::vector<ParamRef> out;
  add_encoder(out, "disc", state.disc.trunk);
  out.push_back({"disc.dense.weight", &state.disc.dense.w, &state.disc.dense.gw});
  out.push_back({"disc.dense.bias", &state.disc.dense.b, &state.disc.dense.gb});
  return out;
}

std::vector<StatRef> batchnorm_stats(ModelState& state) {
  std::vector<StatRef> out;
  add_encoder_stats(out, "enc", state.main.enc);
  add_decoder_stats(out, "fence", state.main.fence);
  add_decoder_stats(out, "wild", state.main.wild);
  add_encoder_stats(out, "disc", state.disc.trunk);
  return out;
}

// ---------------------------------------------------------------------------
// Slice adapters

Tensor slices_to_batch(const std::vector<const datapipe::Slice*>& slices) {
  if (slices.empty()) throw config_error("empty batch");
  int h = slices[0]->height, w = slices[0]->width;
  Tensor batch(static_cast<int>(slices.size()), 1, h, w);
  for (size_t n = 0; n < slices.size(); ++n) {
    if (slices[n]->height != h || slices[n]->width != w) {
      throw config_error("batch slices have mixed shapes");
    }
    std::copy(slices[n]->pixels.begin(), slices[n]->pixels.end(),
              batch.plane(static_cast<int>(n), 0));
  }
  return batch;
}

Tensor slices_to_batch(const std::vector<datapipe::Slice>& slices) {
  std::vector<const datapipe::Slice*> ptrs;
  ptrs.reserve(slices.size());
  for (const auto& s : slices) ptrs.push_back(&s);
  return slices_to_batch(ptrs);
}

datapipe::Slice batch_to_slice(const Tensor& batch, int n, const std::string& subject_id,
                               int index) {
  datapipe::Slice s;
  s.height = batch.h();
  s.width = batch.w();
  s.subject_id = subject_id;
  s.index = index;
  s.pixels.assign(batch.plane(n, 0), batch.plane(n, 0) + batch.plane_size());
  return s;
}

}  // namespace ascnet::netgraph
