#pragma once

#include <vector>

#include "ascnet/core/tensor.hpp"

namespace ascnet::losses {

// Per-step objective values. n and m are the main-batch and reference-batch
// sizes that entered the discriminator terms.
struct LossReport {
  double loss_fence = 0.0;           // >= 0
  double loss_disjoincy = 0.0;       // in [0,1]
  double loss_reconstruction = 0.0;  // >= 0
  double loss_discriminator = 0.0;   // >= 0
  int n = 0;
  int m = 0;
};

// Smoothing term in the soft-Dice denominator (guards empty cuts).
inline constexpr double kDiceEpsilon = 1e-7;

// Mean absolute deviation of the fake scores from +1: the fence decoder's
// fooling objective.
double loss_fence(const std::vector<double>& d_scores_fake);
std::vector<double> loss_fence_grad(const std::vector<double>& d_scores_fake);

// Positive soft Dice between the two cuts, pooled over the batch:
// 2*sum(fc*wc) / (sum(fc) + sum(wc) + eps). Minimizing drives the supports
// apart.
double loss_disjoincy(const Tensor& i_fc, const Tensor& i_wc);
void loss_disjoincy_grad(const Tensor& i_fc, const Tensor& i_wc, Tensor& g_fc, Tensor& g_wc);

// Per-pixel mean squared error between input and reduced reconstruction.
double loss_reconstruction(const Tensor& i_in, const Tensor& i_ro);
Tensor loss_reconstruction_grad(const Tensor& i_in, const Tensor& i_ro);

// MAE discriminator objective: fakes target -1, reference images target +1,
// normalized by n + m.
double loss_discriminator(const std::vector<double>& d_fake,
                          const std::vector<double>& d_real);
void loss_discriminator_grad(const std::vector<double>& d_fake,
                             const std::vector<double>& d_real,
                             std::vector<double>& g_fake, std::vector<double>& g_real);

}  // namespace ascnet::losses
