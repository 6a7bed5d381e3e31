#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

namespace ascnet {

// Dense NCHW tensor of doubles. Lower-rank data (biases, dense weights) uses
// leading dimensions of 1.
class Tensor {
public:
  Tensor() : n_(0), c_(0), h_(0), w_(0) {}
  Tensor(int n, int c, int h, int w)
      : n_(n), c_(c), h_(h), w_(w),
        buf_(static_cast<size_t>(n) * c * h * w, 0.0) {}

  static Tensor zeros(int n, int c, int h, int w) { return Tensor(n, c, h, w); }

  static Tensor full(int n, int c, int h, int w, double value) {
    Tensor t(n, c, h, w);
    for (double& x : t.buf_) x = value;
    return t;
  }

  int n() const { return n_; }
  int c() const { return c_; }
  int h() const { return h_; }
  int w() const { return w_; }
  size_t size() const { return buf_.size(); }
  size_t plane_size() const { return static_cast<size_t>(h_) * w_; }
  bool empty() const { return buf_.empty(); }

  double* data() { return buf_.data(); }
  const double* data() const { return buf_.data(); }

  double& operator[](size_t i) { return buf_[i]; }
  double operator[](size_t i) const { return buf_[i]; }

  double& at(int n, int c, int y, int x) { return buf_[index(n, c, y, x)]; }
  double at(int n, int c, int y, int x) const { return buf_[index(n, c, y, x)]; }

  // Pointer to channel plane (n, c).
  double* plane(int n, int c) { return buf_.data() + plane_offset(n, c); }
  const double* plane(int n, int c) const { return buf_.data() + plane_offset(n, c); }

  double* row(int n, int c, int y) { return plane(n, c) + static_cast<size_t>(y) * w_; }
  const double* row(int n, int c, int y) const { return plane(n, c) + static_cast<size_t>(y) * w_; }

  bool same_shape(const Tensor& o) const {
    return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }

  void fill(double value) {
    for (double& x : buf_) x = value;
  }

private:
  size_t index(int n, int c, int y, int x) const {
    assert(n >= 0 && n < n_ && c >= 0 && c < c_ && y >= 0 && y < h_ && x >= 0 && x < w_);
    return ((static_cast<size_t>(n) * c_ + c) * h_ + y) * w_ + x;
  }
  size_t plane_offset(int n, int c) const {
    return (static_cast<size_t>(n) * c_ + c) * plane_size();
  }

  int n_, c_, h_, w_;
  std::vector<double> buf_;
};

}  // namespace ascnet
