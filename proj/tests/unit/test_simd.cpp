#include <cstring>
#include <random>
#include <vector>

#include "codim2/simd.hpp"
#include "doctest.h"

using namespace codim2;

namespace {

std::vector<double> noise(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng) * std::exp2(static_cast<int>(rng() % 40) - 20);
  return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("reductions are bit-identical across kernel tables") {
  if (!simd::available(simd::Isa::avx2)) return;
  const auto& s = simd::table(simd::Isa::scalar);
  const auto& v = simd::table(simd::Isa::avx2);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 255u, 256u, 257u, 1000u, 4099u, 65536u + 13u}) {
    const auto x = noise(n, 1 + n), y = noise(n, 2 + n), z = noise(n, 3 + n);
    CHECK(same_bits(simd::sum(x, s), simd::sum(x, v)));
    CHECK(same_bits(simd::dot(x, y, s), simd::dot(x, y, v)));
    CHECK(same_bits(simd::dot3(x, y, z, s), simd::dot3(x, y, z, v)));
  }
}

TEST_CASE("complex scaling kernels agree bitwise") {
  if (!simd::available(simd::Isa::avx2)) return;
  for (std::size_t n : {1u, 2u, 5u, 64u, 333u}) {
    const auto z = noise(2 * n, 10 + n), w = noise(n, 20 + n);
    auto a = z, b = z;
    simd::table(simd::Isa::scalar).scale_complex(a.data(), w.data(), n);
    simd::table(simd::Isa::avx2).scale_complex(b.data(), w.data(), n);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
    a = z;
    b = z;
    simd::table(simd::Isa::scalar).scale_complex_imag(a.data(), w.data(), n);
    simd::table(simd::Isa::avx2).scale_complex_imag(b.data(), w.data(), n);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
    CHECK(a[0] == -(z[1] * w[0]));
    CHECK(a[1] == z[0] * w[0]);
  }
}

TEST_CASE("projection kernels agree bitwise, including floor fallback") {
  if (!simd::available(simd::Isa::avx2)) return;
  for (int ncomp : {2, 3, 5}) {
    const std::size_t n = 103;
    std::vector<std::vector<double>> v, fb, oa(ncomp, std::vector<double>(n)), ob = oa;
    for (int c = 0; c < ncomp; ++c) {
      v.push_back(noise(n, 100 + c));
      fb.push_back(noise(n, 200 + c));
    }
    for (int c = 0; c < ncomp; ++c) v[c][17] = 0.0, v[c][50] = 1e-14;
    std::vector<const double*> vp, fp;
    std::vector<double*> ap, bp;
    for (int c = 0; c < ncomp; ++c) {
      vp.push_back(v[c].data());
      fp.push_back(fb[c].data());
      ap.push_back(oa[c].data());
      bp.push_back(ob[c].data());
    }
    std::vector<unsigned char> fa(n), fbits(n);
    simd::table(simd::Isa::scalar).project(vp.data(), ap.data(), fp.data(), ncomp, n, 1e-12, fa.data());
    simd::table(simd::Isa::avx2).project(vp.data(), bp.data(), fp.data(), ncomp, n, 1e-12, fbits.data());
    CHECK(fa == fbits);
    CHECK(fa[17] == 1);
    CHECK(fa[50] == 1);
    for (int c = 0; c < ncomp; ++c)
      CHECK(std::memcmp(oa[c].data(), ob[c].data(), n * sizeof(double)) == 0);
  }
}

TEST_CASE("sum matches a long double reference") {
  const auto x = noise(10007, 5);
  long double ref = 0, mass = 0;
  for (double v : x) ref += v, mass += std::abs(v);
  CHECK(std::abs(simd::sum(x) - static_cast<double>(ref)) < 1e-14 * static_cast<double>(mass));
}
