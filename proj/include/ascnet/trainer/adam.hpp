#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ascnet/core/tensor.hpp"
#include "ascnet/netgraph/model.hpp"

namespace ascnet::trainer {

// Adam with bias correction. Moment slots are keyed by parameter name and
// created lazily; they persist across phases and stages.
class Adam {
public:
  struct Slot {
    Tensor m, v;
  };

  explicit Adam(double learning_rate = 5e-5, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // One update over the given parameters using their accumulated gradients.
  // Throws a numerical error on non-finite gradients.
  void step(const std::vector<netgraph::ParamRef>& params);

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  int64_t step_count() const { return t_; }

  // Serialization access.
  std::map<std::string, Slot>& slots() { return slots_; }
  const std::map<std::string, Slot>& slots() const { return slots_; }
  void set_step_count(int64_t t) { t_ = t; }

private:
  double lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::map<std::string, Slot> slots_;
};

}  // namespace ascnet::trainer
