#include <cmath>

#include "kernels.hpp"

namespace codim2::simd::detail {
namespace {

double leaf_sum(const double* x, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) lane[l] = lane[l] + x[i + l];
  for (int l = 0; i < n; ++i, ++l) lane[l] = lane[l] + x[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double leaf_dot(const double* x, const double* y, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) lane[l] = lane[l] + x[i + l] * y[i + l];
  for (int l = 0; i < n; ++i, ++l) lane[l] = lane[l] + x[i] * y[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double leaf_dot3(const double* x, const double* y, const double* z, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) lane[l] = lane[l] + (x[i + l] * y[i + l]) * z[i + l];
  for (int l = 0; i < n; ++i, ++l) lane[l] = lane[l] + (x[i] * y[i]) * z[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void scale_complex(double* z, const double* w, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    z[2 * k] *= w[k];
    z[2 * k + 1] *= w[k];
  }
}

void scale_complex_imag(double* z, const double* w, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double re = z[2 * k];
    const double im = z[2 * k + 1];
    z[2 * k] = -(im * w[k]);
    z[2 * k + 1] = re * w[k];
  }
}

void project(const double* const* v, double* const* out, const double* const* fallback, int ncomp,
             std::size_t n, double floor, unsigned char* flag) {
  for (std::size_t k = 0; k < n; ++k) {
    double s = v[0][k] * v[0][k];
    for (int c = 1; c < ncomp; ++c) s = s + v[c][k] * v[c][k];
    const double norm = std::sqrt(s);
    if (norm >= floor) {
      for (int c = 0; c < ncomp; ++c) out[c][k] = v[c][k] / norm;
      flag[k] = 0;
    } else {
      for (int c = 0; c < ncomp; ++c) out[c][k] = fallback[c][k];
      flag[k] = 1;
    }
  }
}

}  // namespace

const KernelTable kScalarTable = {
    Isa::scalar, leaf_sum, leaf_dot, leaf_dot3, scale_complex, scale_complex_imag, project,
};

}  // namespace codim2::simd::detail
