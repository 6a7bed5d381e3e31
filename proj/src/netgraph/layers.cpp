#include "ascnet/netgraph/layers.hpp"

#include <algorithm>
#include <cmath>

#include "ascnet/core/error.hpp"
#include "ascnet/core/parallel.hpp"
#include "ascnet/kernels/kernels.hpp"

namespace ascnet::netgraph {

namespace k = ascnet::kernels;

double init_limit(int fan_in) { return std::sqrt(6.0 / fan_in); }

void check_finite(const Tensor& t, const std::string& where) {
  double s = k::ops().sum(t.data(), t.size());
  if (!std::isfinite(s)) {
    throw numerical_error("non-finite activation in " + where);
  }
}

namespace {

void init_uniform(Tensor& w, double limit, Rng& rng) {
  for (size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-limit, limit);
}

// Zero-padded copy of one channel plane (pad 1 on each side).
void pad_plane(const double* src, int h, int w, double* dst) {
  int pw = w + 2;
  std::fill(dst, dst + pw, 0.0);
  for (int y = 0; y < h; ++y) {
    double* row = dst + static_cast<size_t>(y + 1) * pw;
    row[0] = 0.0;
    std::copy(src + static_cast<size_t>(y) * w, src + static_cast<size_t>(y + 1) * w, row + 1);
    row[w + 1] = 0.0;
  }
  std::fill(dst + static_cast<size_t>(h + 1) * pw, dst + static_cast<size_t>(h + 2) * pw, 0.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv2d

void Conv2d::init(int cin_, int cout_, int kernel_, Rng& rng) {
  cin = cin_;
  cout = cout_;
  kernel = kernel_;
  w = Tensor(cout, cin, kernel, kernel);
  b = Tensor(1, 1, 1, cout);
  gw = Tensor(cout, cin, kernel, kernel);
  gb = Tensor(1, 1, 1, cout);
  init_uniform(w, init_limit(cin * kernel * kernel), rng);
}

void Conv2d::zero_grad() {
  gw.fill(0.0);
  gb.fill(0.0);
}

Tensor Conv2d::forward(const Tensor& x) const {
  const int N = x.n(), H = x.h(), W = x.w();
  if (x.c() != cin) throw config_error("conv: channel mismatch");
  Tensor y(N, cout, H, W);
  const auto& ops = k::ops();

  if (kernel == 1) {
    parallel_for(static_cast<size_t>(N) * cout, [&](size_t idx) {
      int n = static_cast<int>(idx / cout);
      int co = static_cast<int>(idx % cout);
      double* yp = y.plane(n, co);
      std::fill(yp, yp + y.plane_size(), b[co]);
      for (int ci = 0; ci < cin; ++ci) {
        ops.axpy(yp, x.plane(n, ci), w.at(co, ci, 0, 0), x.plane_size());
      }
    });
    return y;
  }

  // 3x3 same padding. Padded input planes are built once per sample, then
  // every output row is nine shifted-row axpys per input channel.
  const int PW = W + 2;
  Tensor padded(N, cin, H + 2, PW);
  parallel_for(static_cast<size_t>(N) * cin, [&](size_t idx) {
    int n = static_cast<int>(idx / cin);
    int ci = static_cast<int>(idx % cin);
    pad_plane(x.plane(n, ci), H, W, padded.plane(n, ci));
  });

  parallel_for(static_cast<size_t>(N) * cout, [&](size_t idx) {
    int n = static_cast<int>(idx / cout);
    int co = static_cast<int>(idx % cout);
    std::vector<double> acc(W);
    for (int y0 = 0; y0 < H; ++y0) {
      std::fill(acc.begin(), acc.end(), b[co]);
      for (int ci = 0; ci < cin; ++ci) {
        for (int ky = 0; ky < 3; ++ky) {
          const double* prow = padded.row(n, ci, y0 + ky);
          for (int kx = 0; kx < 3; ++kx) {
            ops.axpy(acc.data(), prow + kx, w.at(co, ci, ky, kx), W);
          }
        }
      }
      std::copy(acc.begin(), acc.end(), y.row(n, co, y0));
    }
  });
  return y;
}

Tensor Conv2d::backward(const Tensor& x, const Tensor& gy, bool accumulate_params,
                        bool want_gx) {
  const int N = x.n(), H = x.h(), W = x.w();
  const auto& ops = k::ops();
  Tensor gx;

  if (kernel == 1) {
    if (accumulate_params) {
      parallel_for(cout, [&](size_t co) {
        double gbv = 0.0;
        for (int n = 0; n < N; ++n) gbv += ops.sum(gy.plane(n, static_cast<int>(co)), gy.plane_size());
        gb[co] += gbv;
        for (int ci = 0; ci < cin; ++ci) {
          double acc = 0.0;
          for (int n = 0; n < N; ++n) {
            acc += ops.dot(gy.plane(n, static_cast<int>(co)), x.plane(n, ci), x.plane_size());
          }
          gw.at(static_cast<int>(co), ci, 0, 0) += acc;
        }
      });
    }
    if (want_gx) {
      gx = Tensor(N, cin, H, W);
      parallel_for(static_cast<size_t>(N) * cin, [&](size_t idx) {
        int n = static_cast<int>(idx / cin);
        int ci = static_cast<int>(idx % cin);
        double* gxp = gx.plane(n, ci);
        for (int co = 0; co < cout; ++co) {
          ops.axpy(gxp, gy.plane(n, co), w.at(co, ci, 0, 0), gx.plane_size());
        }
      });
    }
    return gx;
  }

  const int PW = W + 2;
  Tensor padded(N, cin, H + 2, PW);
  parallel_for(static_cast<size_t>(N) * cin, [&](size_t idx) {
    int n = static_cast<int>(idx / cin);
    int ci = static_cast<int>(idx % cin);
    pad_plane(x.plane(n, ci), H, W, padded.plane(n, ci));
  });

  if (accumulate_params) {
    parallel_for(cout, [&](size_t co_idx) {
      int co = static_cast<int>(co_idx);
      double gbv = 0.0;
      for (int n = 0; n < N; ++n) gbv += ops.sum(gy.plane(n, co), gy.plane_size());
      gb[co] += gbv;
      for (int ci = 0; ci < cin; ++ci) {
        for (int ky = 0; ky < 3; ++ky) {
          for (int kx = 0; kx < 3; ++kx) {
            double acc = 0.0;
            for (int n = 0; n < N; ++n) {
              for (int y0 = 0; y0 < H; ++y0) {
                acc += ops.dot(gy.row(n, co, y0), padded.row(n, ci, y0 + ky) + kx, W);
              }
            }
            gw.at(co, ci, ky, kx) += acc;
          }
        }
      }
    });
  }

  if (want_gx) {
    gx = Tensor(N, cin, H, W);
    parallel_for(static_cast<size_t>(N) * cin, [&](size_t idx) {
      int n = static_cast<int>(idx / cin);
      int ci = static_cast<int>(idx % cin);
      // Accumulate into a padded gradient plane, then crop the interior.
      std::vector<double> gpad(static_cast<size_t>(H + 2) * PW, 0.0);
      for (int co = 0; co < cout; ++co) {
        for (int ky = 0; ky < 3; ++ky) {
          for (int kx = 0; kx < 3; ++kx) {
            double wv = w.at(co, ci, ky, kx);
            if (wv == 0.0) continue;
            for (int y0 = 0; y0 < H; ++y0) {
              ops.axpy(gpad.data() + static_cast<size_t>(y0 + ky) * PW + kx,
                       gy.row(n, co, y0), wv, W);
            }
          }
        }
      }
      for (int y0 = 0; y0 < H; ++y0) {
        std::copy(gpad.begin() + static_cast<size_t>(y0 + 1) * PW + 1,
                  gpad.begin() + static_cast<size_t>(y0 + 1) * PW + 1 + W,
                  gx.row(n, ci, y0));
      }
    });
  }
  return gx;
}

// ---------------------------------------------------------------------------
// ConvTranspose2d (2x2, stride 2)

void ConvTranspose2d::init(int cin_, int cout_, Rng& rng) {
  cin = cin_;
  cout = cout_;
  w = Tensor(cin, cout, 2, 2);
  b = Tensor(1, 1, 1, cout);
  gw = Tensor(cin, cout, 2, 2);
  gb = Tensor(1, 1, 1, cout);
  // Each output pixel receives exactly one tap per input channel.
  init_uniform(w, init_limit(cin), rng);
}

void ConvTranspose2d::zero_grad() {
  gw.fill(0.0);
  gb.fill(0.0);
}

Tensor ConvTranspose2d::forward(const Tensor& x) const {
  const int N = x.n(), H = x.h(), W = x.w();
  if (x.c() != cin) throw config_error("tconv: channel mismatch");
  Tensor y(N, cout, 2 * H, 2 * W);
  const auto& ops = k::ops();
  const size_t plane = x.plane_size();

  parallel_for(static_cast<size_t>(N) * cout, [&](size_t idx) {
    int n = static_cast<int>(idx / cout);
    int co = static_cast<int>(idx % cout);
    std::vector<double> q(plane);
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        std::fill(q.begin(), q.end(), b[co]);
        for (int ci = 0; ci < cin; ++ci) {
          ops.axpy(q.data(), x.plane(n, ci), w.at(ci, co, dy, dx), plane);
        }
        // Scatter the sub-lattice plane into the upsampled output.
        for (int yy = 0; yy < H; ++yy) {
          double* dst = y.row(n, co, 2 * yy + dy) + dx;
          const double* src = q.data() + static_cast<size_t>(yy) * W;
          for (int xx = 0; xx < W; ++xx) dst[2 * xx] = src[xx];
        }
      }
    }
  });
  return y;
}

Tensor ConvTranspose2d::backward(const Tensor& x, const Tensor& gy, bool accumulate_params,
                                 bool want_gx) {
  const int N = x.n(), H = x.h(), W = x.w();
  const auto& ops = k::ops();
  const size_t plane = x.plane_size();

  // De-interleave gy into its four sub-lattice planes per (n, co).
  Tensor g_sub(N, cout * 4, H, W);
  parallel_for(static_cast<size_t>(N) * cout, [&](size_t idx) {
    int n = static_cast<int>(idx / cout);
    int co = static_cast<int>(idx % cout);
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        double* dst = g_sub.plane(n, co * 4 + dy * 2 + dx);
        for (int yy = 0; yy < H; ++yy) {
          const double* src = gy.row(n, co, 2 * yy + dy) + dx;
          double* drow = dst + static_cast<size_t>(yy) * W;
          for (int xx = 0; xx < W; ++xx) drow[xx] = src[2 * xx];
        }
      }
    }
  });

  if (accumulate_params) {
    parallel_for(cout, [&](size_t co_idx) {
      int co = static_cast<int>(co_idx);
      double gbv = 0.0;
      for (int n = 0; n < N; ++n) gbv += ops.sum(gy.plane(n, co), gy.plane_size());
      gb[co] += gbv;
    });
    parallel_for(cin, [&](size_t ci_idx) {
      int ci = static_cast<int>(ci_idx);
      for (int co = 0; co < cout; ++co) {
        for (int d = 0; d < 4; ++d) {
          double acc = 0.0;
          for (int n = 0; n < N; ++n) {
            acc += ops.dot(x.plane(n, ci), g_sub.plane(n, co * 4 + d), plane);
          }
          gw.at(ci, co, d / 2, d % 2) += acc;
        }
      }
    });
  }

  Tensor gx;
  if (want_gx) {
    gx = Tensor(N, cin, H, W);
    parallel_for(static_cast<size_t>(N) * cin, [&](size_t idx) {
      int n = static_cast<int>(idx / cin);
      int ci = static_cast<int>(idx % cin);
      double* gxp = gx.plane(n, ci);
      for (int co = 0; co < cout; ++co) {
        for (int d = 0; d < 4; ++d) {
          ops.axpy(gxp, g_sub.plane(n, co * 4 + d), w.at(ci, co, d / 2, d % 2), plane);
        }
      }
    });
  }
  return gx;
}

// ---------------------------------------------------------------------------
// BatchNorm2d

void BatchNorm2d::init(int channels_) {
  channels = channels_;
  gamma = Tensor::full(1, 1, 1, channels, 1.0);
  beta = Tensor(1, 1, 1, channels);
  ggamma = Tensor(1, 1, 1, channels);
  gbeta = Tensor(1, 1, 1, channels);
  running_mean = Tensor(1, 1, 1, channels);
  running_var = Tensor::full(1, 1, 1, channels, 1.0);
}

void BatchNorm2d::zero_grad() {
  ggamma.fill(0.0);
  gbeta.fill(0.0);
}

Tensor BatchNorm2d::forward(const Tensor& x, bool training, BnTape* tape) {
  const int N = x.n(), C = x.c();
  if (C != channels) throw config_error("batchnorm: channel mismatch");
  Tensor y(N, C, x.h(), x.w());
  const auto& ops = k::ops();
  const size_t plane = x.plane_size();
  const double count = static_cast<double>(N) * plane;

  std::vector<double> mean(C), inv_std(C);

  if (training) {
    for (int c = 0; c < C; ++c) {
      double s = 0.0, ss = 0.0;
      for (int n = 0; n < N; ++n) {
        s += ops.sum(x.plane(n, c), plane);
        ss += ops.sum_sq(x.plane(n, c), plane);
      }
      double m = s / count;
      double var = std::max(0.0, ss / count - m * m);
      mean[c] = m;
      inv_std[c] = 1.0 / std::sqrt(var + eps);
      running_mean[c] = momentum * running_mean[c] + (1.0 - momentum) * m;
      running_var[c] = momentum * running_var[c] + (1.0 - momentum) * var;
    }
  } else {
    for (int c = 0; c < C; ++c) {
      mean[c] = running_mean[c];
      inv_std[c] = 1.0 / std::sqrt(running_var[c] + eps);
    }
  }

  parallel_for(static_cast<size_t>(N) * C, [&](size_t idx) {
    int n = static_cast<int>(idx / C);
    int c = static_cast<int>(idx % C);
    double a = gamma[c] * inv_std[c];
    double b_ = beta[c] - a * mean[c];
    ops.axpby(y.plane(n, c), x.plane(n, c), a, b_, plane);
  });

  if (tape != nullptr) {
    tape->x = x;
    tape->mean = std::move(mean);
    tape->inv_std = std::move(inv_std);
    tape->training = training;
  }
  return y;
}

Tensor BatchNorm2d::backward(const Tensor& gy, const BnTape& tape, bool accumulate_params) {
  const Tensor& x = tape.x;
  const int N = x.n(), C = x.c();
  const auto& ops = k::ops();
  const size_t plane = x.plane_size();
  const double count = static_cast<double>(N) * plane;
  Tensor gx(N, C, x.h(), x.w());

  parallel_for(C, [&](size_t c_idx) {
    int c = static_cast<int>(c_idx);
    double mu = tape.mean[c];
    double inv = tape.inv_std[c];
    double s1 = 0.0, sxy = 0.0;
    for (int n = 0; n < N; ++n) {
      s1 += ops.sum(gy.plane(n, c), plane);
      sxy += ops.dot(gy.plane(n, c), x.plane(n, c), plane);
    }
    double s2 = inv * (sxy - mu * s1);  // sum of gy * xhat

    if (accumulate_params) {
      ggamma[c] += s2;
      gbeta[c] += s1;
    }

    if (tape.training) {
      // dx = A*gy + B*x + C with the batch-statistics terms folded in.
      double A = gamma[c] * inv;
      double B = -gamma[c] * inv * inv * s2 / count;
      double C0 = -A * s1 / count + gamma[c] * inv * inv * s2 * mu / count;
      for (int n = 0; n < N; ++n) {
        ops.axpby(gx.plane(n, c), gy.plane(n, c), A, C0, plane);
        ops.axpy(gx.plane(n, c), x.plane(n, c), B, plane);
      }
    } else {
      double A = gamma[c] * inv;
      for (int n = 0; n < N; ++n) {
        ops.axpby(gx.plane(n, c), gy.plane(n, c), A, 0.0, plane);
      }
    }
  });
  return gx;
}

// ---------------------------------------------------------------------------
// MaxPool 2x2 / Dropout

Tensor maxpool2_forward(const Tensor& x, MaxPoolTape* tape) {
  const int N = x.n(), C = x.c(), H = x.h(), W = x.w();
  if (H % 2 != 0 || W % 2 != 0) throw config_error("maxpool: odd input size");
  Tensor y(N, C, H / 2, W / 2);
  if (tape != nullptr) {
    tape->argmax.assign(y.size(), 0);
    tape->in_h = H;
    tape->in_w = W;
  }
  parallel_for(static_cast<size_t>(N) * C, [&](size_t idx) {
    int n = static_cast<int>(idx / C);
    int c = static_cast<int>(idx % C);
    const double* xp = x.plane(n, c);
    double* yp = y.plane(n, c);
    uint8_t* am = tape != nullptr
                      ? tape->argmax.data() + (static_cast<size_t>(n) * C + c) * y.plane_size()
                      : nullptr;
    for (int yy = 0; yy < H / 2; ++yy) {
      for (int xx = 0; xx < W / 2; ++xx) {
        double best = xp[static_cast<size_t>(2 * yy) * W + 2 * xx];
        uint8_t pos = 0;
        for (uint8_t p = 1; p < 4; ++p) {
          double v = xp[static_cast<size_t>(2 * yy + p / 2) * W + 2 * xx + p % 2];
          if (v > best) {
            best = v;
            pos = p;
          }
        }
        yp[static_cast<size_t>(yy) * (W / 2) + xx] = best;
        if (am != nullptr) am[static_cast<size_t>(yy) * (W / 2) + xx] = pos;
      }
    }
  });
  return y;
}

Tensor maxpool2_backward(const Tensor& gy, const MaxPoolTape& tape, int n, int c) {
  const int N = n, C = c, H = tape.in_h, W = tape.in_w;
  Tensor gx(N, C, H, W);
  parallel_for(static_cast<size_t>(N) * C, [&](size_t idx) {
    int nn = static_cast<int>(idx / C);
    int cc = static_cast<int>(idx % C);
    const double* gp = gy.plane(nn, cc);
    double* gxp = gx.plane(nn, cc);
    const uint8_t* am = tape.argmax.data() + (static_cast<size_t>(nn) * C + cc) * gy.plane_size();
    for (int yy = 0; yy < H / 2; ++yy) {
      for (int xx = 0; xx < W / 2; ++xx) {
        size_t i = static_cast<size_t>(yy) * (W / 2) + xx;
        uint8_t pos = am[i];
        gxp[static_cast<size_t>(2 * yy + pos / 2) * W + 2 * xx + pos % 2] = gp[i];
      }
    }
  });
  return gx;
}

Tensor dropout_forward(const Tensor& x, double rate, bool training, Rng& rng,
                       DropoutTape* tape) {
  if (!training || rate <= 0.0) {
    if (tape != nullptr) tape->mask = Tensor();
    return x;
  }
  double keep = 1.0 - rate;
  Tensor mask(x.n(), x.c(), x.h(), x.w());
  for (size_t i = 0; i < mask.size(); ++i) {
    mask[i] = rng.uniform() < keep ? 1.0 / keep : 0.0;
  }
  Tensor y(x.n(), x.c(), x.h(), x.w());
  k::ops().mul(y.data(), x.data(), mask.data(), x.size());
  if (tape != nullptr) tape->mask = std::move(mask);
  return y;
}

Tensor dropout_backward(const Tensor& gy, const DropoutTape& tape) {
  if (tape.mask.empty()) return gy;
  Tensor gx(gy.n(), gy.c(), gy.h(), gy.w());
  k::ops().mul(gx.data(), gy.data(), tape.mask.data(), gy.size());
  return gx;
}

// ---------------------------------------------------------------------------
// Dense head

void Dense::init(int in_features_, Rng& rng) {
  in_features = in_features_;
  w = Tensor(1, 1, 1, in_features);
  b = Tensor(1, 1, 1, 1);
  gw = Tensor(1, 1, 1, in_features);
  gb = Tensor(1, 1, 1, 1);
  init_uniform(w, init_limit(in_features), rng);
}

void Dense::zero_grad() {
  gw.fill(0.0);
  gb.fill(0.0);
}

std::vector<double> Dense::forward(const Tensor& x) const {
  const size_t features = x.size() / x.n();
  if (features != static_cast<size_t>(in_features)) {
    throw config_error("dense: feature count mismatch");
  }
  std::vector<double> out(x.n());
  const auto& ops = k::ops();
  for (int n = 0; n < x.n(); ++n) {
    out[n] = b[0] + ops.dot(w.data(), x.data() + static_cast<size_t>(n) * features, features);
  }
  return out;
}

Tensor Dense::backward(const Tensor& x, const std::vector<double>& gy,
                       bool accumulate_params, bool want_gx) {
  const size_t features = x.size() / x.n();
  const auto& ops = k::ops();
  if (accumulate_params) {
    for (int n = 0; n < x.n(); ++n) {
      ops.axpy(gw.data(), x.data() + static_cast<size_t>(n) * features, gy[n], features);
      gb[0] += gy[n];
    }
  }
  Tensor gx;
  if (want_gx) {
    gx = Tensor(x.n(), x.c(), x.h(), x.w());
    for (int n = 0; n < x.n(); ++n) {
      ops.axpby(gx.data() + static_cast<size_t>(n) * features, w.data(), gy[n], 0.0, features);
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// Activations / concat

Tensor sigmoid_forward(const Tensor& x) {
  Tensor y(x.n(), x.c(), x.h(), x.w());
  for (size_t i = 0; i < x.size(); ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
  return y;
}

Tensor sigmoid_backward(const Tensor& gy, const Tensor& y) {
  Tensor gx(gy.n(), gy.c(), gy.h(), gy.w());
  for (size_t i = 0; i < gy.size(); ++i) gx[i] = gy[i] * y[i] * (1.0 - y[i]);
  return gx;
}

double tanh_scalar(double x) { return std::tanh(x); }

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.n() != b.n() || a.h() != b.h() || a.w() != b.w()) {
    throw config_error("concat: spatial shape mismatch");
  }
  Tensor y(a.n(), a.c() + b.c(), a.h(), a.w());
  for (int n = 0; n < a.n(); ++n) {
    std::copy(a.plane(n, 0), a.plane(n, 0) + static_cast<size_t>(a.c()) * a.plane_size(),
              y.plane(n, 0));
    std::copy(b.plane(n, 0), b.plane(n, 0) + static_cast<size_t>(b.c()) * b.plane_size(),
              y.plane(n, a.c()));
  }
  return y;
}

void split_channels(const Tensor& g, int c_a, Tensor& ga, Tensor& gb) {
  int c_b = g.c() - c_a;
  ga = Tensor(g.n(), c_a, g.h(), g.w());
  gb = Tensor(g.n(), c_b, g.h(), g.w());
  for (int n = 0; n < g.n(); ++n) {
    std::copy(g.plane(n, 0), g.plane(n, 0) + static_cast<size_t>(c_a) * g.plane_size(),
              ga.plane(n, 0));
    std::copy(g.plane(n, c_a), g.plane(n, c_a) + static_cast<size_t>(c_b) * g.plane_size(),
              gb.plane(n, 0));
  }
}

}  // namespace ascnet::netgraph
