#include <immintrin.h>

#include <cmath>

#include "kernels.hpp"

namespace codim2::simd::detail {
namespace {

double finish(__m256d acc, const double* tail_x, const double* tail_y, const double* tail_z,
              std::size_t r) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t l = 0; l < r; ++l) {
    double t = tail_x[l];
    if (tail_y) t = t * tail_y[l];
    if (tail_z) t = t * tail_z[l];
    lane[l] = lane[l] + t;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double leaf_sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  return finish(acc, x + i, nullptr, nullptr, n - i);
}

double leaf_dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  return finish(acc, x + i, y + i, nullptr, n - i);
}

double leaf_dot3(const double* x, const double* y, const double* z, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(xy, _mm256_loadu_pd(z + i)));
  }
  return finish(acc, x + i, y + i, z + i, n - i);
}

inline __m256d pair_weights(const double* w) {
  return _mm256_set_m128d(_mm_set1_pd(w[1]), _mm_set1_pd(w[0]));
}

void scale_complex(double* z, const double* w, std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d v = _mm256_loadu_pd(z + 2 * k);
    _mm256_storeu_pd(z + 2 * k, _mm256_mul_pd(v, pair_weights(w + k)));
  }
  for (; k < n; ++k) {
    z[2 * k] *= w[k];
    z[2 * k + 1] *= w[k];
  }
}

void scale_complex_imag(double* z, const double* w, std::size_t n) {
  const __m256d neg_re = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d swapped = _mm256_permute_pd(_mm256_loadu_pd(z + 2 * k), 0b0101);
    const __m256d prod = _mm256_mul_pd(swapped, pair_weights(w + k));
    _mm256_storeu_pd(z + 2 * k, _mm256_xor_pd(prod, neg_re));
  }
  for (; k < n; ++k) {
    const double re = z[2 * k];
    const double im = z[2 * k + 1];
    z[2 * k] = -(im * w[k]);
    z[2 * k + 1] = re * w[k];
  }
}

void project(const double* const* v, double* const* out, const double* const* fallback, int ncomp,
             std::size_t n, double floor, unsigned char* flag) {
  const __m256d vfloor = _mm256_set1_pd(floor);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d s = _mm256_loadu_pd(v[0] + k);
    s = _mm256_mul_pd(s, s);
    for (int c = 1; c < ncomp; ++c) {
      const __m256d x = _mm256_loadu_pd(v[c] + k);
      s = _mm256_add_pd(s, _mm256_mul_pd(x, x));
    }
    const __m256d norm = _mm256_sqrt_pd(s);
    const __m256d ok = _mm256_cmp_pd(norm, vfloor, _CMP_GE_OQ);
    for (int c = 0; c < ncomp; ++c) {
      const __m256d q = _mm256_div_pd(_mm256_loadu_pd(v[c] + k), norm);
      _mm256_storeu_pd(out[c] + k, _mm256_blendv_pd(_mm256_loadu_pd(fallback[c] + k), q, ok));
    }
    const int mask = _mm256_movemask_pd(ok);
    for (int l = 0; l < 4; ++l) flag[k + l] = ((mask >> l) & 1) ? 0 : 1;
  }
  for (; k < n; ++k) {
    double s = v[0][k] * v[0][k];
    for (int c = 1; c < ncomp; ++c) s = s + v[c][k] * v[c][k];
    const double norm = std::sqrt(s);
    const bool ok = norm >= floor;
    for (int c = 0; c < ncomp; ++c) out[c][k] = ok ? v[c][k] / norm : fallback[c][k];
    flag[k] = ok ? 0 : 1;
  }
}

}  // namespace

const KernelTable kAvx2Table = {
    Isa::avx2, leaf_sum, leaf_dot, leaf_dot3, scale_complex, scale_complex_imag, project,
};

}  // namespace codim2::simd::detail
