#include <atomic>
#include <cstdlib>
#include <string>

#include "codim2/errors.hpp"
#include "kernels.hpp"

namespace codim2::simd {
namespace {

const KernelTable* initial_table() {
  const char* env = std::getenv("CODIM2_SIMD");
  if (env && std::string(env) == "scalar") return &detail::kScalarTable;
  if (available(Isa::avx2)) return &table(Isa::avx2);
  return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{initial_table()};
  return t;
}

template <class Leaf>
double tree(std::size_t first_leaf, std::size_t leaves, std::size_t n, const Leaf& leaf) {
  if (leaves == 1) {
    const std::size_t lo = first_leaf * kLeaf;
    const std::size_t len = lo + kLeaf <= n ? kLeaf : n - lo;
    return leaf(lo, len);
  }
  const std::size_t left = leaves / 2;
  return tree(first_leaf, left, n, leaf) + tree(first_leaf + left, leaves - left, n, leaf);
}

template <class Leaf>
double reduce(std::size_t n, const Leaf& leaf) {
  if (n == 0) return 0.0;
  return tree(0, (n + kLeaf - 1) / kLeaf, n, leaf);
}

void require_length(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidArgument("simd reduction: length mismatch");
}

}  // namespace

std::string_view name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool available(Isa isa) {
  if (isa == Isa::scalar) return true;
#ifdef CODIM2_HAVE_AVX2
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& table(Isa isa) {
#ifdef CODIM2_HAVE_AVX2
  if (isa == Isa::avx2) {
    if (!available(Isa::avx2)) throw InvalidArgument("avx2 kernels not supported on this CPU");
    return detail::kAvx2Table;
  }
#else
  if (isa == Isa::avx2) throw InvalidArgument("avx2 kernels not compiled in");
#endif
  return detail::kScalarTable;
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void force(Isa isa) { current().store(&table(isa), std::memory_order_relaxed); }

double sum(std::span<const double> x, const KernelTable& k) {
  return reduce(x.size(), [&](std::size_t lo, std::size_t len) { return k.leaf_sum(x.data() + lo, len); });
}

double dot(std::span<const double> x, std::span<const double> y, const KernelTable& k) {
  require_length(x.size(), y.size());
  return reduce(x.size(), [&](std::size_t lo, std::size_t len) {
    return k.leaf_dot(x.data() + lo, y.data() + lo, len);
  });
}

double dot3(std::span<const double> x, std::span<const double> y, std::span<const double> z,
            const KernelTable& k) {
  require_length(x.size(), y.size());
  require_length(x.size(), z.size());
  return reduce(x.size(), [&](std::size_t lo, std::size_t len) {
    return k.leaf_dot3(x.data() + lo, y.data() + lo, z.data() + lo, len);
  });
}

}  // namespace codim2::simd
