#pragma once

#include <cstddef>
#include <string>

namespace ascnet::kernels {

// Inner-loop kernels behind the network, the losses and the histogram math.
// Two implementations exist: a scalar reference and an AVX2/FMA variant.
// The active one is chosen at runtime (CPU probe + ASCNET_SIMD=scalar|avx2|auto).
// Element-wise kernels are bit-identical across backends; reductions and
// fused multiply-adds may differ in the last ulps, which the equivalence
// tests bound.
struct Ops {
  // dst[i] += a * src[i]
  void (*axpy)(double* dst, const double* src, double a, size_t n);
  // dst[i] = a * src[i] + b
  void (*axpby)(double* dst, const double* src, double a, double b, size_t n);
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, size_t n);
  double (*sum)(const double* a, size_t n);
  double (*sum_sq)(const double* a, size_t n);
  // sum_i a[i] * a[i] with a[i] = x[i] - y[i]
  double (*sum_sq_diff)(const double* x, const double* y, size_t n);
  // sum_i min(a[i], b[i])
  double (*sum_min)(const double* a, const double* b, size_t n);
  void (*add)(double* dst, const double* a, const double* b, size_t n);
  void (*sub)(double* dst, const double* a, const double* b, size_t n);
  void (*mul)(double* dst, const double* a, const double* b, size_t n);
  void (*scale)(double* dst, double a, size_t n);
  // dst[i] = max(src[i], 0)
  void (*relu)(double* dst, const double* src, size_t n);
  // dst[i] = g[i] where pre[i] > 0, else 0
  void (*relu_backward)(double* dst, const double* g, const double* pre, size_t n);
};

enum class Backend { scalar, avx2 };

bool cpu_supports_avx2();

// Table for an explicit backend; throws if the backend is unavailable.
const Ops& ops(Backend backend);

// Active table per the environment selection.
const Ops& ops();

Backend active_backend();
std::string backend_name(Backend backend);

namespace scalar {
void axpy(double* dst, const double* src, double a, size_t n);
void axpby(double* dst, const double* src, double a, double b, size_t n);
double dot(const double* a, const double* b, size_t n);
double sum(const double* a, size_t n);
double sum_sq(const double* a, size_t n);
double sum_sq_diff(const double* x, const double* y, size_t n);
double sum_min(const double* a, const double* b, size_t n);
void add(double* dst, const double* a, const double* b, size_t n);
void sub(double* dst, const double* a, const double* b, size_t n);
void mul(double* dst, const double* a, const double* b, size_t n);
void scale(double* dst, double a, size_t n);
void relu(double* dst, const double* src, size_t n);
void relu_backward(double* dst, const double* g, const double* pre, size_t n);
}  // namespace scalar

}  // namespace ascnet::kernels
