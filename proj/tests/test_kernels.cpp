#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ascnet/core/rng.hpp"
#include "ascnet/kernels/kernels.hpp"

using namespace ascnet;
namespace k = ascnet::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, size_t n, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

// Reduction tolerance scaled by the magnitude of the summands.
void check_close_reduction(double ref, double got, double magnitude) {
  CHECK(std::abs(ref - got) <= 1e-12 * magnitude + 1e-300);
}

}  // namespace

TEST_CASE("scalar kernels: basic behavior") {
  std::vector<double> a = {1.0, -2.0, 3.0};
  std::vector<double> b = {4.0, 5.0, -6.0};
  std::vector<double> d = {1.0, 1.0, 1.0};

  k::scalar::axpy(d.data(), a.data(), 2.0, 3);
  CHECK(d[0] == 3.0);
  CHECK(d[1] == -3.0);
  CHECK(d[2] == 7.0);

  CHECK(k::scalar::dot(a.data(), b.data(), 3) == doctest::Approx(4.0 - 10.0 - 18.0));
  CHECK(k::scalar::sum(a.data(), 3) == 2.0);
  CHECK(k::scalar::sum_sq(a.data(), 3) == 14.0);
  CHECK(k::scalar::sum_sq_diff(a.data(), b.data(), 3) == 9.0 + 49.0 + 81.0);
  CHECK(k::scalar::sum_min(a.data(), b.data(), 3) == 1.0 - 2.0 - 6.0);

  std::vector<double> r(3);
  std::vector<double> pre = {0.5, -0.1, 0.0};
  k::scalar::relu(r.data(), pre.data(), 3);
  CHECK(r[0] == 0.5);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 0.0);
  std::vector<double> g = {1.0, 2.0, 3.0};
  k::scalar::relu_backward(r.data(), g.data(), pre.data(), 3);
  CHECK(r[0] == 1.0);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 0.0);
}

TEST_CASE("avx2 kernels match the scalar reference") {
  if (!k::cpu_supports_avx2()) {
    MESSAGE("AVX2 unavailable; equivalence suite skipped on this machine");
    return;
  }
  const k::Ops& simd = k::ops(k::Backend::avx2);
  Rng rng(20240811);

  // Sizes chosen to hit the unrolled body, the 4-wide tail and the scalar
  // remainder, plus tiny vectors.
  for (size_t n : {size_t(1), size_t(2), size_t(3), size_t(4), size_t(5), size_t(7),
                   size_t(8), size_t(13), size_t(64), size_t(65), size_t(160),
                   size_t(1023)}) {
    auto a = random_vec(rng, n);
    auto b = random_vec(rng, n);

    // Element-wise kernels: bit-exact (no reassociation, no FMA).
    {
      std::vector<double> r1(n), r2(n);
      k::scalar::add(r1.data(), a.data(), b.data(), n);
      simd.add(r2.data(), a.data(), b.data(), n);
      CHECK(r1 == r2);
      k::scalar::sub(r1.data(), a.data(), b.data(), n);
      simd.sub(r2.data(), a.data(), b.data(), n);
      CHECK(r1 == r2);
      k::scalar::mul(r1.data(), a.data(), b.data(), n);
      simd.mul(r2.data(), a.data(), b.data(), n);
      CHECK(r1 == r2);
      r1 = a;
      r2 = a;
      k::scalar::scale(r1.data(), 1.7, n);
      simd.scale(r2.data(), 1.7, n);
      CHECK(r1 == r2);
      k::scalar::relu(r1.data(), a.data(), n);
      simd.relu(r2.data(), a.data(), n);
      CHECK(r1 == r2);
      k::scalar::relu_backward(r1.data(), b.data(), a.data(), n);
      simd.relu_backward(r2.data(), b.data(), a.data(), n);
      CHECK(r1 == r2);
    }

    // FMA kernels: last-ulp differences allowed.
    {
      std::vector<double> r1(n, 0.5), r2(n, 0.5);
      k::scalar::axpy(r1.data(), a.data(), -1.3, n);
      simd.axpy(r2.data(), a.data(), -1.3, n);
      for (size_t i = 0; i < n; ++i) CHECK(r1[i] == doctest::Approx(r2[i]).epsilon(1e-14));
      k::scalar::axpby(r1.data(), a.data(), 0.8, -0.2, n);
      simd.axpby(r2.data(), a.data(), 0.8, -0.2, n);
      for (size_t i = 0; i < n; ++i) CHECK(r1[i] == doctest::Approx(r2[i]).epsilon(1e-14));
    }

    // Reductions: tolerance scaled by sum of |terms|.
    {
      double mag_dot = 0.0, mag_sum = 0.0;
      for (size_t i = 0; i < n; ++i) {
        mag_dot += std::abs(a[i] * b[i]);
        mag_sum += std::abs(a[i]);
      }
      check_close_reduction(k::scalar::dot(a.data(), b.data(), n),
                            simd.dot(a.data(), b.data(), n), mag_dot);
      check_close_reduction(k::scalar::sum(a.data(), n), simd.sum(a.data(), n), mag_sum);
      check_close_reduction(k::scalar::sum_sq(a.data(), n), simd.sum_sq(a.data(), n),
                            k::scalar::sum_sq(a.data(), n));
      check_close_reduction(k::scalar::sum_sq_diff(a.data(), b.data(), n),
                            simd.sum_sq_diff(a.data(), b.data(), n),
                            k::scalar::sum_sq_diff(a.data(), b.data(), n));
      check_close_reduction(k::scalar::sum_min(a.data(), b.data(), n),
                            simd.sum_min(a.data(), b.data(), n), mag_sum + 4.0);
    }
  }
}

TEST_CASE("backend selection") {
  const k::Ops& active = k::ops();
  CHECK(active.dot != nullptr);
  // The scalar table is always reachable.
  const k::Ops& sc = k::ops(k::Backend::scalar);
  double a[2] = {1.0, 2.0};
  CHECK(sc.sum(a, 2) == 3.0);
}
