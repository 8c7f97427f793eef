#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>

#include "codim2/errors.hpp"
#include "codim2/simd.hpp"
#include "codim2/spectral.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace codim2;
using std::numbers::pi;

TEST_CASE("multiplier invariants") {
  const TorusGrid g(3, {1.0, 2.0, 0.5}, {16, 8, 12});
  const GaussianMultiplier m(g, 3e-3);
  const HalfSpectrum spec(g);
  CHECK(m.weights()[0] == 1.0);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    CHECK(m.weights()[i] > 0.0);
    CHECK(m.weights()[i] <= 1.0);
  }
  for (std::size_t i = 0; i < spec.size(); ++i)
    for (std::size_t j = 0; j < spec.size(); j += 7)
      if (spec.squared_frequency(i) < spec.squared_frequency(j)) CHECK(m.weights()[i] >= m.weights()[j]);
  CHECK_THROWS_AS(heat_convolve(testing::plane_wave(TorusGrid::cube(2, 8)), 0.0), InvalidArgument);
}

TEST_CASE("constants are preserved") {
  const auto g = TorusGrid::cube(3, 16);
  const double e[] = {1.0, 0.0};
  const auto v = heat_convolve(VectorField::constant(g, e), 0.05);
  CHECK(max_abs_difference(v, VectorField::constant(g, e)) <= 1e-13);
}

TEST_CASE("plane wave decays by the single-mode weight") {
  const auto g = TorusGrid::cube(3, 16);
  const auto u = testing::plane_wave(g);
  const auto v = heat_convolve(u, 1.0 / (4 * pi * pi));
  CHECK(max_abs_difference(v, std::exp(-1.0) * u) < 1e-14);
}

TEST_CASE("matches the wrapped real-space kernel") {
  const auto g = TorusGrid::cube(3, 16);
  const auto u = testing::random_unit_field(g, 2, 42);
  for (double t : {0.01, 0.03}) {
    const auto v = heat_convolve(u, t);
    CHECK(max_abs_difference(v, testing::wrapped_gaussian_convolve(u, t)) < 1e-10);
  }
}

TEST_CASE("gradient of a mollified plane wave") {
  const auto g = TorusGrid::cube(3, 16);
  const double t = 2e-3;
  const auto grad = grad_heat_convolve(testing::plane_wave(g), t);
  const double expected = 4 * pi * pi * std::exp(-8 * pi * pi * t);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double s = 0.0;
    for (const auto& ga : grad)
      for (int c = 0; c < 2; ++c) s += ga.at(k, c) * ga.at(k, c);
    worst = std::max(worst, std::abs(s - expected) / expected);
  }
  CHECK(worst < 1e-13);
  const double e[] = {0.6, 0.8};
  for (const auto& ga : grad_heat_convolve(VectorField::constant(g, e), t))
    CHECK(max_abs_difference(ga, VectorField(g, 2)) < 1e-15);
}

TEST_CASE("Plancherel for the mollified Dirichlet integral") {
  const TorusGrid g(3, {1.0, 1.5, 2.0}, {16, 16, 8});
  const auto u = testing::random_unit_field(g, 2, 3);
  const double h = 4e-3;
  double direct = 0.0;
  for (const auto& ga : grad_heat_convolve(u, h / 2)) direct += dot_integral(ga, ga);
  const double fourier = Spectrum(u).power([&](double q) { return 4 * pi * pi * q * std::exp(-4 * pi * pi * h * q); });
  // The direct form drops the Nyquist derivative; remove it from the sum too.
  const HalfSpectrum spec(g);
  double dropped = 0.0;
  {
    const Spectrum s(u);
    const double n = static_cast<double>(g.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const Index3 k = spec.mode(i);
      double m2 = 0.0;
      for (int a = 0; a < 3; ++a)
        if (k[a] == g.resolution(a) / 2) m2 += std::pow(2 * pi * k[a] / g.period(a), 2);
      double p = 0.0;
      for (int c = 0; c < 2; ++c) p += std::norm(s.coefficients(c)[i]);
      dropped += spec.multiplicity(i) * m2 * std::exp(-4 * pi * pi * h * spec.squared_frequency(i)) * p *
                 g.volume() / (n * n);
    }
  }
  CHECK(std::abs(direct - (fourier - dropped)) <= 1e-10 * fourier);
}

TEST_CASE("semigroup, self-adjointness, contraction, maximum principle") {
  const auto g = TorusGrid::cube(3, 16);
  const auto f = testing::random_unit_field(g, 3, 11), w = testing::random_unit_field(g, 3, 12);
  const double s = 2e-3, t = 5e-3;
  CHECK(max_abs_difference(heat_convolve(heat_convolve(f, s), t), heat_convolve(f, s + t)) < 1e-12);
  const double a = dot_integral(f, heat_convolve(w, t)), b = dot_integral(heat_convolve(f, t), w);
  CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  const auto v = heat_convolve(f, t);
  CHECK(dot_integral(v, v) <= dot_integral(f, f));
  double vmax = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double s2 = 0.0;
    for (int c = 0; c < 3; ++c) s2 += v.at(k, c) * v.at(k, c);
    vmax = std::max(vmax, std::sqrt(s2));
  }
  CHECK(vmax <= 1.0 + 1e-10);
}

TEST_CASE("commutator special cases") {
  const auto g = TorusGrid::cube(2, 32);
  const auto u = testing::smooth_unit_field(g, 2, 5);
  CHECK(max_abs_difference(commutator(ScalarField(g, 2.5), u, 1e-3), VectorField(g, 2)) < 1e-14);
  const auto psi = sample_scalar(g, [](const Point& x) { return std::sin(2 * pi * x[0]) + 0.3 * std::cos(2 * pi * x[1]); });
  const double e[] = {0.6, 0.8};
  const auto uc = VectorField::constant(g, e);
  const auto gp = heat_convolve(psi, 1e-3);
  VectorField expected(g, 2);
  for (std::size_t k = 0; k < g.size(); ++k)
    for (int c = 0; c < 2; ++c) expected.at(k, c) = e[c] * (gp[k] - psi[k]);
  CHECK(max_abs_difference(commutator(psi, uc, 1e-3), expected) < 1e-14);
  CHECK_THROWS_AS(commutator(ScalarField(TorusGrid::cube(2, 16)), u, 1e-3), InvalidArgument);
}

TEST_CASE("convolution output is independent of kernel table and thread count") {
  const auto g = TorusGrid::cube(3, 16);
  const auto u = testing::random_unit_field(g, 4, 9);
  simd::force(simd::Isa::scalar);
  const auto ref = heat_convolve(u, 1e-3);
  const auto dref = Spectrum(u).derivative(1e-3, 1);
  if (simd::available(simd::Isa::avx2)) {
    simd::force(simd::Isa::avx2);
    const auto v = heat_convolve(u, 1e-3);
    CHECK(std::memcmp(v.planar().data(), ref.planar().data(), ref.planar().size_bytes()) == 0);
    const auto d = Spectrum(u).derivative(1e-3, 1);
    CHECK(std::memcmp(d.planar().data(), dref.planar().data(), dref.planar().size_bytes()) == 0);
  }
  setenv("CODIM2_THREADS", "1", 1);
  const auto single = heat_convolve(u, 1e-3);
  setenv("CODIM2_THREADS", "4", 1);
  const auto multi = heat_convolve(u, 1e-3);
  unsetenv("CODIM2_THREADS");
  CHECK(std::memcmp(single.planar().data(), multi.planar().data(), multi.planar().size_bytes()) == 0);
}
