#include "ascnet/trainer/adam.hpp"

#include <cmath>

#include "ascnet/core/error.hpp"

namespace ascnet::trainer {

void Adam::step(const std::vector<netgraph::ParamRef>& params) {
  t_ += 1;
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));

  for (const auto& p : params) {
    Slot& slot = slots_[p.name];
    if (slot.m.size() != p.value->size()) {
      slot.m = Tensor(p.value->n(), p.value->c(), p.value->h(), p.value->w());
      slot.v = Tensor(p.value->n(), p.value->c(), p.value->h(), p.value->w());
    }
    double* w = p.value->data();
    const double* g = p.grad->data();
    double* m = slot.m.data();
    double* v = slot.v.data();
    for (size_t i = 0; i < p.value->size(); ++i) {
      if (!std::isfinite(g[i])) {
        throw numerical_error("non-finite gradient for parameter " + p.name);
      }
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      w[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

}  // namespace ascnet::trainer
