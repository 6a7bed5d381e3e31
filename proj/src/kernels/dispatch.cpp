#include <cstdlib>
#include <cstring>

#include "ascnet/core/error.hpp"
#include "kernels_internal.hpp"

namespace ascnet::kernels {

namespace {

const Ops scalar_table = {
    scalar::axpy, scalar::axpby, scalar::dot,   scalar::sum,   scalar::sum_sq,
    scalar::sum_sq_diff, scalar::sum_min, scalar::add,   scalar::sub,   scalar::mul,
    scalar::scale, scalar::relu, scalar::relu_backward,
};

Backend select_backend() {
  const char* env = std::getenv("ASCNET_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Backend::scalar;
  if (env != nullptr && std::strcmp(env, "avx2") == 0) {
    if (!cpu_supports_avx2() || avx2_ops_table() == nullptr) {
      throw config_error("ASCNET_SIMD=avx2 requested but AVX2 is unavailable");
    }
    return Backend::avx2;
  }
  // auto
  if (cpu_supports_avx2() && avx2_ops_table() != nullptr) return Backend::avx2;
  return Backend::scalar;
}

}  // namespace

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& ops(Backend backend) {
  if (backend == Backend::scalar) return scalar_table;
  const Ops* t = avx2_ops_table();
  if (t == nullptr || !cpu_supports_avx2()) {
    throw config_error("AVX2 kernel backend is unavailable on this machine");
  }
  return *t;
}

Backend active_backend() {
  static const Backend backend = select_backend();
  return backend;
}

const Ops& ops() { return ops(active_backend()); }

std::string backend_name(Backend backend) {
  return backend == Backend::scalar ? "scalar" : "avx2";
}

}  // namespace ascnet::kernels
