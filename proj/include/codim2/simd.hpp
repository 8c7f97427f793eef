#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace codim2::simd {

enum class Isa { scalar, avx2 };

std::string_view name(Isa isa);

/// Inner loops with one reference (scalar) implementation and optional
/// vector variants. Every variant performs the same IEEE operations in the
/// same order, so results are bit-identical across ISAs.
///
/// Reductions sum fixed leaves of `kLeaf` elements in four interleaved lanes,
/// combine lanes as (l0 + l1) + (l2 + l3), and join leaves by a pairwise tree
/// whose shape depends only on the length.
struct KernelTable {
  Isa isa;
  // Leaf reductions; `n` is at most kLeaf.
  double (*leaf_sum)(const double* x, std::size_t n);
  double (*leaf_dot)(const double* x, const double* y, std::size_t n);
  double (*leaf_dot3)(const double* x, const double* y, const double* z, std::size_t n);
  // z[k] *= w[k] for interleaved complex z of length n.
  void (*scale_complex)(double* z, const double* w, std::size_t n);
  // z[k] *= i * w[k].
  void (*scale_complex_imag)(double* z, const double* w, std::size_t n);
  // Nodewise out = v / |v| over `ncomp` planar components. Nodes with
  // |v| < floor copy `fallback` instead and have flag[k] set to 1.
  void (*project)(const double* const* v, double* const* out, const double* const* fallback,
                  int ncomp, std::size_t n, double floor, unsigned char* flag);
};

inline constexpr std::size_t kLeaf = 256;

bool available(Isa isa);
const KernelTable& table(Isa isa);

/// Kernels in use: AVX2 when the CPU supports it, unless the environment
/// variable CODIM2_SIMD=scalar forces the reference path.
const KernelTable& active();
void force(Isa isa);  // tests only

double sum(std::span<const double> x, const KernelTable& k = active());
double dot(std::span<const double> x, std::span<const double> y, const KernelTable& k = active());
double dot3(std::span<const double> x, std::span<const double> y, std::span<const double> z,
            const KernelTable& k = active());

}  // namespace codim2::simd
