#include "ascnet/losses/losses.hpp"

#include <cmath>

#include "ascnet/core/error.hpp"
#include "ascnet/kernels/kernels.hpp"

namespace ascnet::losses {

namespace k = ascnet::kernels;

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) throw config_error(std::string(what) + ": shape mismatch");
}

}  // namespace

double loss_fence(const std::vector<double>& d_scores_fake) {
  if (d_scores_fake.empty()) throw config_error("loss_fence: empty score list");
  double acc = 0.0;
  for (double s : d_scores_fake) acc += std::abs(s - 1.0);
  return acc / static_cast<double>(d_scores_fake.size());
}

std::vector<double> loss_fence_grad(const std::vector<double>& d_scores_fake) {
  if (d_scores_fake.empty()) throw config_error("loss_fence: empty score list");
  double inv = 1.0 / static_cast<double>(d_scores_fake.size());
  std::vector<double> g(d_scores_fake.size());
  for (size_t i = 0; i < g.size(); ++i) g[i] = sign(d_scores_fake[i] - 1.0) * inv;
  return g;
}

double loss_disjoincy(const Tensor& i_fc, const Tensor& i_wc) {
  require_same_shape(i_fc, i_wc, "loss_disjoincy");
  const auto& ops = k::ops();
  double inter = ops.dot(i_fc.data(), i_wc.data(), i_fc.size());
  double denom = ops.sum(i_fc.data(), i_fc.size()) + ops.sum(i_wc.data(), i_wc.size()) +
                 kDiceEpsilon;
  return 2.0 * inter / denom;
}

void loss_disjoincy_grad(const Tensor& i_fc, const Tensor& i_wc, Tensor& g_fc, Tensor& g_wc) {
  require_same_shape(i_fc, i_wc, "loss_disjoincy");
  const auto& ops = k::ops();
  double inter = ops.dot(i_fc.data(), i_wc.data(), i_fc.size());
  double denom = ops.sum(i_fc.data(), i_fc.size()) + ops.sum(i_wc.data(), i_wc.size()) +
                 kDiceEpsilon;
  // d/da_i [2P/D] = 2*(b_i*D - P) / D^2
  double inv_d = 1.0 / denom;
  double p_over_d2 = 2.0 * inter * inv_d * inv_d;
  g_fc = Tensor(i_fc.n(), i_fc.c(), i_fc.h(), i_fc.w());
  g_wc = Tensor(i_fc.n(), i_fc.c(), i_fc.h(), i_fc.w());
  ops.axpby(g_fc.data(), i_wc.data(), 2.0 * inv_d, -p_over_d2, i_fc.size());
  ops.axpby(g_wc.data(), i_fc.data(), 2.0 * inv_d, -p_over_d2, i_fc.size());
}

double loss_reconstruction(const Tensor& i_in, const Tensor& i_ro) {
  require_same_shape(i_in, i_ro, "loss_reconstruction");
  double ss = k::ops().sum_sq_diff(i_in.data(), i_ro.data(), i_in.size());
  return ss / static_cast<double>(i_in.size());
}

Tensor loss_reconstruction_grad(const Tensor& i_in, const Tensor& i_ro) {
  require_same_shape(i_in, i_ro, "loss_reconstruction");
  Tensor g(i_in.n(), i_in.c(), i_in.h(), i_in.w());
  double scale = 2.0 / static_cast<double>(i_in.size());
  const auto& ops = k::ops();
  ops.sub(g.data(), i_ro.data(), i_in.data(), g.size());
  ops.scale(g.data(), scale, g.size());
  return g;
}

double loss_discriminator(const std::vector<double>& d_fake,
                          const std::vector<double>& d_real) {
  if (d_fake.empty() || d_real.empty()) {
    throw config_error("loss_discriminator: empty score list");
  }
  double acc = 0.0;
  for (double s : d_fake) acc += std::abs(s + 1.0);
  for (double s : d_real) acc += std::abs(s - 1.0);
  return acc / static_cast<double>(d_fake.size() + d_real.size());
}

void loss_discriminator_grad(const std::vector<double>& d_fake,
                             const std::vector<double>& d_real,
                             std::vector<double>& g_fake, std::vector<double>& g_real) {
  if (d_fake.empty() || d_real.empty()) {
    throw config_error("loss_discriminator: empty score list");
  }
  double inv = 1.0 / static_cast<double>(d_fake.size() + d_real.size());
  g_fake.resize(d_fake.size());
  g_real.resize(d_real.size());
  for (size_t i = 0; i < d_fake.size(); ++i) g_fake[i] = sign(d_fake[i] + 1.0) * inv;
  for (size_t i = 0; i < d_real.size(); ++i) g_real[i] = sign(d_real[i] - 1.0) * inv;
}

}  // namespace ascnet::losses
