#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ascnet/core/rng.hpp"
#include "ascnet/core/tensor.hpp"

namespace ascnet::netgraph {

// Primitive layers with explicit forward/backward. Each layer owns its
// parameters and gradient accumulators; backward adds into the accumulators
// and returns the input gradient. Forward caches live in per-call tape
// structs so evaluation never mutates hidden state.

struct Conv2d {
  int cin = 0, cout = 0, kernel = 3;  // kernel 3 -> pad 1 ("same"), kernel 1 -> pad 0
  Tensor w;   // [cout, cin, k, k]
  Tensor b;   // [1, 1, 1, cout]
  Tensor gw, gb;

  void init(int cin, int cout, int kernel, Rng& rng);
  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& gy, bool accumulate_params,
                  bool want_gx);
  void zero_grad();
};

// 2x2 stride-2 transposed convolution (the decoder upsampler).
struct ConvTranspose2d {
  int cin = 0, cout = 0;
  Tensor w;   // [cin, cout, 2, 2]
  Tensor b;   // [1, 1, 1, cout]
  Tensor gw, gb;

  void init(int cin, int cout, Rng& rng);
  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& gy, bool accumulate_params,
                  bool want_gx);
  void zero_grad();
};

struct BnTape {
  Tensor x;                      // layer input
  std::vector<double> mean;      // per-channel statistics used by this pass
  std::vector<double> inv_std;
  bool training = false;
};

struct BatchNorm2d {
  int channels = 0;
  double eps = 1e-3;
  double momentum = 0.99;  // running = momentum * running + (1 - momentum) * batch
  Tensor gamma, beta, ggamma, gbeta;      // [1,1,1,C]
  Tensor running_mean, running_var;       // [1,1,1,C]

  void init(int channels);
  // Training mode uses batch statistics (biased variance) and updates the
  // running estimates; eval mode is a per-channel affine map.
  Tensor forward(const Tensor& x, bool training, BnTape* tape);
  Tensor backward(const Tensor& gy, const BnTape& tape, bool accumulate_params);
  void zero_grad();
};

struct MaxPoolTape {
  std::vector<uint8_t> argmax;  // 0..3 position within each 2x2 window
  int in_h = 0, in_w = 0;
};

Tensor maxpool2_forward(const Tensor& x, MaxPoolTape* tape);
Tensor maxpool2_backward(const Tensor& gy, const MaxPoolTape& tape, int n, int c);

struct DropoutTape {
  Tensor mask;  // empty when inactive; otherwise 0 or 1/keep
};

Tensor dropout_forward(const Tensor& x, double rate, bool training, Rng& rng,
                       DropoutTape* tape);
Tensor dropout_backward(const Tensor& gy, const DropoutTape& tape);

// Flatten-to-one-unit dense head (the discriminator classifier).
struct Dense {
  int in_features = 0;
  Tensor w;   // [1,1,1,in_features]
  Tensor b;   // [1,1,1,1]
  Tensor gw, gb;

  void init(int in_features, Rng& rng);
  std::vector<double> forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const std::vector<double>& gy,
                  bool accumulate_params, bool want_gx);
  void zero_grad();
};

Tensor sigmoid_forward(const Tensor& x);
Tensor sigmoid_backward(const Tensor& gy, const Tensor& y);
double tanh_scalar(double x);

// Channel concatenation [a, b] and its gradient split.
Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& g, int c_a, Tensor& ga, Tensor& gb);

// Fan-in scaled uniform limit used for weight initialization.
double init_limit(int fan_in);

// Throws a numerical error naming `where` if the tensor contains a
// non-finite value.
void check_finite(const Tensor& t, const std::string& where);

}  // namespace ascnet::netgraph
