#include "ascnet/kernels/kernels.hpp"

// Reference implementations. Plain left-to-right loops; the AVX2 variants are
// checked against these.

namespace ascnet::kernels::scalar {

void axpy(double* dst, const double* src, double a, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] += a * src[i];
}

void axpby(double* dst, const double* src, double a, double b, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = a * src[i] + b;
}

double dot(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* a, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double sum_sq(const double* a, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double sum_sq_diff(const double* x, const double* y, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

double sum_min(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i] < b[i] ? a[i] : b[i];
  return acc;
}

void add(double* dst, const double* a, const double* b, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub(double* dst, const double* a, const double* b, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = a[i] - b[i];
}

void mul(double* dst, const double* a, const double* b, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void scale(double* dst, double a, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] *= a;
}

void relu(double* dst, const double* src, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = src[i] > 0.0 ? src[i] : 0.0;
}

void relu_backward(double* dst, const double* g, const double* pre, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = pre[i] > 0.0 ? g[i] : 0.0;
}

}  // namespace ascnet::kernels::scalar
