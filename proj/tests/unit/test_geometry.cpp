#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "codim2/errors.hpp"
#include "codim2/geometry.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace codim2;
using std::numbers::pi;

namespace {

// Brute-force periodic distance to a densely sampled polyline.
double dense_distance(const Point& x, const Curve& c, int samples) {
  const double len = c.length();
  double best = 1e300;
  const auto& L = c.period();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point a = c.segment_start(i);
    const Point v = c.segment_vector(i);
    const double sl = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    const int m = std::max(2, static_cast<int>(std::ceil(samples * sl / len)));
    for (int j = 0; j <= m; ++j) {
      double d2 = 0.0;
      for (int k = 0; k < c.dim(); ++k) {
        double d = x[k] - (a[k] + v[k] * j / m);
        d -= L[k] * std::round(d / L[k]);
        d2 += d * d;
      }
      best = std::min(best, d2);
    }
  }
  return std::sqrt(best);
}

double hausdorff(const Curve& a, const Curve& b) {
  double h = 0.0;
  for (const Point& p : a.vertices()) h = std::max(h, distance_to_curve(p, b));
  for (const Point& p : b.vertices()) h = std::max(h, distance_to_curve(p, a));
  return h;
}

std::vector<std::size_t> square_loop(const TorusGrid& g, Index3 corner, int side, int a, int b) {
  std::vector<std::size_t> loop;
  Index3 c = corner;
  for (int i = 0; i < side; ++i, ++c[a]) loop.push_back(g.index(c));
  for (int i = 0; i < side; ++i, ++c[b]) loop.push_back(g.index(c));
  for (int i = 0; i < side; ++i, --c[a]) loop.push_back(g.index(c));
  for (int i = 0; i < side; ++i, --c[b]) loop.push_back(g.index(c));
  return loop;
}

Curve straight(double x0, double x1, int orientation) {
  return Curve::line(2, {x0, x1, 0.0}, 16, {1, 1, 1}, orientation);
}

}  // namespace

TEST_CASE("curve invariants") {
  CHECK_THROWS_AS(Curve({{0, 0, 0}, {0.1, 0, 0}, {0.1, 0.1, 0}}, 3, {1, 1, 1}), InvalidArgument);
  std::vector<Point> jump;
  for (int k = 0; k < 8; ++k) jump.push_back({k == 4 ? 0.53 : 0.01 * k, 0.0, 0.0});
  CHECK_THROWS_AS(Curve(jump, 3, {1, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(Curve::circle({0.5, 0.5, 0.5}, 0.1, 2, 16, {1, 1, 1}, 0), InvalidArgument);
  const auto c = Curve::circle({0.5, 0.5, 0.5}, 0.25, 2, 256);
  CHECK(c.length() == doctest::Approx(2 * 256 * 0.25 * std::sin(pi / 256)).epsilon(1e-13));
  CHECK(c.lattice_winding() == std::array<int, 3>{0, 0, 0});
  CHECK(straight(0.3, 0.3, 1).lattice_winding() == std::array<int, 3>{0, 0, 1});
}

TEST_CASE("distance_to_curve examples and dense-sampling oracle") {
  const double R = 0.25;
  const int nv = 200;
  const auto c = Curve::circle({0.0, 0.0, 0.0}, R, 2, nv);
  const double arc = 2 * pi * R / nv;
  CHECK(std::abs(distance_to_curve({R + 0.05, 0.0, 0.0}, c) - 0.05) <= arc * arc / (8 * R));
  CHECK(distance_to_curve(c.vertices()[17], c) == 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto wavy = Curve::circle({0.4, 0.6, 0.3}, 0.2, 0, 64);
  int tested = 0;
  for (int i = 0; i < 200; ++i) {
    const Point x{U(rng), U(rng), U(rng)};
    for (const Curve* cv : {&c, &wavy}) {
      const double ref = dense_distance(x, *cv, 10000);
      if (ref < 0.05) continue;
      ++tested;
      CHECK(std::abs(distance_to_curve(x, *cv) - ref) <= 1e-6);
    }
  }
  CHECK(tested > 300);
}

TEST_CASE("localization profile") {
  const LocalizationProfile f(0.1);
  CHECK(0.5 * f.value(0.05) == doctest::Approx(0.00125).epsilon(1e-14));
  CHECK(0.5 * f.value(0.3) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK_THROWS_AS(LocalizationProfile(0.0), InvalidArgument);
  const double s = 0.1, eps = 1e-12;
  CHECK(f.value(s + eps) == doctest::Approx(s * s).epsilon(1e-9));
  CHECK(f.derivative(s + eps) == doctest::Approx(2 * s).epsilon(1e-9));
  CHECK(f.second_derivative(s + eps) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(f.value(2 * s - eps) == doctest::Approx(4 * s * s).epsilon(1e-9));
  CHECK(std::abs(f.derivative(2 * s - eps)) < 1e-9);
  CHECK(std::abs(f.second_derivative(2 * s - eps)) < 1e-8);
  double prev = f.value(s);
  for (int i = 1; i <= 10000; ++i) {
    const double r = s + s * i / 10000.0;
    CHECK(f.value(r) >= prev);
    CHECK(f.derivative(r) >= -1e-15);
    prev = f.value(r);
  }
  // Derivatives agree with central differences of the value.
  for (double r : {0.11, 0.13, 0.15, 0.17, 0.19}) {
    const double d = 1e-6;
    CHECK(f.derivative(r) == doctest::Approx((f.value(r + d) - f.value(r - d)) / (2 * d)).epsilon(1e-7));
    CHECK(f.second_derivative(r) ==
          doctest::Approx((f.derivative(r + d) - f.derivative(r - d)) / (2 * d)).epsilon(1e-7));
  }
}

TEST_CASE("phi_sigma against per-node distances, bounds and Hessian surrogate") {
  const auto g = TorusGrid::cube(3, 32);
  const auto c = Curve::circle({0.5, 0.5, 0.5}, 0.25, 2, 128);
  const double sigma = 0.1;
  const auto phi = phi_sigma(g, c, sigma);
  const LocalizationProfile f(sigma);
  for (std::size_t k = 0; k < g.size(); k += 7) {
    const double ref = 0.5 * f.value(std::min(distance_to_curve(g.position(k), c), 2 * sigma));
    CHECK(phi[k] == doctest::Approx(ref).epsilon(1e-12));
  }
  const Curve arr[] = {c};
  const auto d = distance_field(g, arr, 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(phi[k] >= 0.0);
    CHECK(phi[k] <= 2 * sigma * sigma);
    if (d[k] > 2 * sigma) CHECK(phi[k] == 2 * sigma * sigma);
    if (d[k] > 0) CHECK(phi[k] > 0.0);
  }
  CHECK_THROWS_AS(phi_sigma(g, c, 0.0), InvalidArgument);

  // Node exactly on a curve.
  const Point node = g.position(g.index({5, 9, 0}));
  const auto line = Curve::line(2, node, 16);
  const auto phl = phi_sigma(g, line, sigma);
  CHECK(phl[g.index({5, 9, 3})] == 0.0);
  CHECK(phl[g.index({6, 9, 3})] > 0.0);

  // Second differences along grid lines in the near field are bounded by spacing^2.
  const double h = g.spacing(0);
  const auto dfine = distance_field(g, arr, 1.0);
  int stencils = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    for (int a = 0; a < 3; ++a) {
      const std::size_t p = g.shifted(k, a, 1), m = g.shifted(k, a, -1);
      if (dfine[k] >= sigma || dfine[p] >= sigma || dfine[m] >= sigma) continue;
      ++stencils;
      CHECK(phi[p] + phi[m] - 2 * phi[k] <= h * h * 1.1);
    }
  CHECK(stencils > 1000);
}

TEST_CASE("localization gradient matches central differences of phi") {
  const auto g = TorusGrid::cube(3, 64);
  const Curve arr[] = {Curve::circle({0.5, 0.5, 0.5}, 0.25, 2, 256)};
  const double sigma = 0.1;
  const auto phi = phi_sigma(g, arr, sigma);
  const auto xi = localization_gradient(g, arr, sigma);
  const double h = g.spacing(0);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    for (int a = 0; a < 3; ++a) {
      const double fd = (phi[g.shifted(k, a, 1)] - phi[g.shifted(k, a, -1)]) / (2 * h);
      worst = std::max(worst, std::abs(fd - xi[a][k]));
    }
  // Central differences are exact for the quadratic near field; the blend has
  // bounded third derivative, so the error is O(h^2 / sigma).
  CHECK(worst < 10 * h * h / sigma);
}

TEST_CASE("analytic filament field") {
  const auto g = TorusGrid::cube(3, 16);
  const Point p = g.position(g.index({4, 6, 2}));
  const auto u = analytic_filament_field(g, [&](double) { return std::array<double, 2>{p[0] - 0.1, p[1]}; }, 1);
  const std::size_t k = g.index({4, 6, 2});
  CHECK(std::abs(u.at(k, 0)) < 1e-15);
  CHECK(u.at(k, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(u.is_unit());

  const auto gam = [](double x3) { return std::array<double, 2>{0.5 + 0.05 * std::sin(2 * pi * x3), 0.5}; };
  const auto plus = analytic_filament_field(g, gam, 1);
  const auto minus = analytic_filament_field(g, gam, -1);
  CHECK(max_abs_difference(minus, -1.0 * plus) == 0.0);
  for (int z = 0; z < 16; ++z) {
    auto loop = square_loop(g, {5, 5, z}, 6, 0, 1);
    // The sign rotates the phase by pi and leaves the winding unchanged.
    CHECK(winding_number(plus, loop).winding == 1);
    CHECK(winding_number(minus, loop).winding == 1);
    std::reverse(loop.begin(), loop.end());
    CHECK(winding_number(plus, loop).winding == -1);
  }
  CHECK_THROWS_AS(analytic_filament_field(g, [&](double) { return std::array<double, 2>{p[0], p[1]}; }, 1),
                  InvalidArgument);
}

TEST_CASE("winding number examples and refinement stability") {
  const auto g = TorusGrid::cube(2, 32);
  const double e[] = {1.0, 0.0};
  const auto c = VectorField::constant(g, e);
  const auto loop = square_loop(g, {3, 3, 0}, 5, 0, 1);
  CHECK(winding_number(c, loop).winding == 0);

  const PointVortex pv[] = {{{0.3, 0.3}, 1}, {{0.7, 0.7}, -1}};
  const auto u = periodic_vortex_field(g, pv);
  for (int side = 2; side <= 8; ++side) {
    const auto fine = square_loop(g, {9 - side / 2, 9 - side / 2, 0}, side, 0, 1);
    const std::size_t corners[] = {fine[0], fine[side], fine[2 * side], fine[3 * side]};
    const auto wf = winding_number(u, fine);
    const auto wc = winding_number(u, corners);
    CHECK(wf.winding == 1);
    CHECK_FALSE(wf.ambiguous);
    if (!wc.ambiguous) CHECK(wc.winding == wf.winding);
    CHECK(wf.defect < 1e-12);
  }
  VectorField anti(g, 2);
  for (std::size_t k = 0; k < g.size(); ++k) anti.at(k, 0) = k % 2 ? 1.0 : -1.0;
  const std::size_t two[] = {0, 1, 2};
  CHECK(winding_number(anti, two).ambiguous);
}

TEST_CASE("periodic filament synthesis: line pair") {
  const auto g = TorusGrid::cube(3, 32);
  CHECK(max_abs_difference(periodic_filament_field(g, {}), VectorField::constant(g, std::vector<double>{1, 0})) ==
        0.0);
  const Curve pair[] = {straight(0.26, 0.51, 1), straight(0.74, 0.51, -1)};
  const auto u = periodic_filament_field(g, pair);
  CHECK(u.is_unit());
  const auto p = pierced_plaquettes(u);
  int plus = 0, minus = 0;
  for (const auto& q : p) {
    CHECK(q.normal_axis == 2);
    CHECK_FALSE(q.ambiguous);
    if (q.winding == 1) {
      ++plus;
      CHECK(std::abs(q.center[0] - 0.26) <= g.spacing(0));
    } else {
      ++minus;
      CHECK(q.winding == -1);
      CHECK(std::abs(q.center[0] - 0.74) <= g.spacing(0));
    }
    CHECK(std::abs(q.center[1] - 0.51) <= g.spacing(1));
  }
  CHECK(plus == 32);
  CHECK(minus == 32);
  for (int z = 0; z < 32; z += 5) {
    CHECK(winding_number(u, square_loop(g, {6, 14, z}, 5, 0, 1)).winding == 1);
    CHECK(winding_number(u, square_loop(g, {21, 14, z}, 5, 0, 1)).winding == -1);
  }

  const auto ex = extract_vorticity(u);
  REQUIRE(ex.ok);
  REQUIRE(ex.curves.size() == 2);
  for (const auto& cv : ex.curves) {
    const double h = std::min(hausdorff(cv, pair[0]), hausdorff(cv, pair[1]));
    CHECK(h <= g.spacing(0));
  }
  const auto refined = extract_vorticity(u, 0.5 * g.spacing(0) * g.spacing(0));
  REQUIRE(refined.ok);
  for (const auto& cv : refined.curves)
    CHECK(std::min(hausdorff(cv, pair[0]), hausdorff(cv, pair[1])) <= g.spacing(0));

  const Curve single[] = {straight(0.5, 0.5, 1)};
  try {
    periodic_filament_field(g, single);
    FAIL("expected a topology error");
  } catch (const TopologyError& e) {
    CHECK(e.axis() == 2);
  }
}

TEST_CASE("plaquette flux conservation over full cross-sections") {
  const auto g = TorusGrid::cube(3, 64);
  const Curve curves[] = {Curve::circle({0.5, 0.5, 0.5}, 0.25, 0, 128),
                          Curve::circle({0.3, 0.4, 0.6}, 0.15, 2, 96, {1, 1, 1}, -1)};
  const auto u = periodic_filament_field(g, curves);
  const auto p = pierced_plaquettes(u);
  for (int axis = 0; axis < 3; ++axis)
    for (int layer = 0; layer < 64; ++layer) {
      int total = 0;
      for (const auto& q : p)
        if (q.normal_axis == axis && static_cast<int>(q.center[axis] / g.spacing(axis)) == layer) total += q.winding;
      CHECK(total == 0);
    }
  for (const auto& ex : {extract_vorticity(u), extract_vorticity(u, 0.5 * g.spacing(0) * g.spacing(0))}) {
    REQUIRE(ex.ok);
    REQUIRE(ex.curves.size() == 2);
    for (const auto& cv : ex.curves)
      CHECK(std::min(hausdorff(cv, curves[0]), hausdorff(cv, curves[1])) <= g.spacing(0));
  }
}

TEST_CASE("circle round trip at n = 128") {
  const auto g = TorusGrid::cube(3, 128);
  const double R0 = 0.25;
  const Curve circle[] = {Curve::circle({0.5, 0.5, 0.5}, R0, 2, 512)};
  const auto u = periodic_filament_field(g, circle);
  CHECK(u.is_unit());
  const auto ex = extract_vorticity(u, 0.5 * g.spacing(0) * g.spacing(0));
  REQUIRE(ex.ok);
  REQUIRE(ex.curves.size() == 1);
  CHECK(hausdorff(ex.curves[0], circle[0]) <= g.spacing(0));
  CHECK(std::abs(ex.curves[0].length() - 2 * pi * R0) <= 0.1 * 2 * pi * R0);
  // The smeared Jacobian biases the area radius about 2% low at this resolution.
  const double r = area_radius(u, g.spacing(0) * g.spacing(0));
  CHECK(r < R0);
  CHECK(std::abs(r - R0) <= 0.025 * R0);
}

TEST_CASE("extraction degrades to the raw set") {
  const auto g = TorusGrid::cube(3, 16);
  const auto c = VectorField::constant(g, std::vector<double>{0, 1});
  const auto empty = extract_vorticity(c);
  CHECK(empty.ok);
  CHECK(empty.curves.empty());
  CHECK(empty.raw.empty());
  const auto rough = extract_vorticity(testing::random_unit_field(g, 2, 3));
  CHECK_FALSE(rough.ok);
  CHECK(rough.curves.empty());
  CHECK_FALSE(rough.raw.empty());
  CHECK_FALSE(rough.diagnostic.empty());
}

TEST_CASE("point vortices: synthesis, extraction and centroid") {
  const auto g = TorusGrid::cube(2, 64);
  const PointVortex pv[] = {{{0.25, 0.25}, 1}, {{0.25, 0.75}, -1}};
  const auto u = periodic_vortex_field(g, pv);
  CHECK(u.is_unit());
  const auto found = extract_vortices(u);
  REQUIRE(found.size() == 2);
  for (const auto& v : found) {
    const auto& truth = v.degree == 1 ? pv[0] : pv[1];
    CHECK(std::abs(v.position[0] - truth.position[0]) <= g.spacing(0));
    CHECK(std::abs(v.position[1] - truth.position[1]) <= g.spacing(1));
  }
  const double t = g.spacing(0) * g.spacing(0);
  const auto mu = jacobian_vorticity(u, t)[0];
  double inside = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.position(k);
    if (std::abs(x[0] - 0.25) < 0.2 && std::abs(x[1] - 0.25) < 0.2) inside += mu[k] * g.cell_volume();
  }
  CHECK(inside == doctest::Approx(1.0).epsilon(0.02));
  const auto c = vortex_centroid(u, t, {0.27, 0.24}, 0.15);
  CHECK(std::hypot(c[0] - 0.25, c[1] - 0.25) <= 0.5 * g.spacing(0));

  // An exact isolated vortex away from the seam is located to a small fraction of a cell.
  const auto exact = analytic_filament_field(g, [](double) { return std::array<double, 2>{0.4737, 0.5212}; }, 1);
  const auto ce = vortex_centroid(exact, t, {0.48, 0.51}, 0.15);
  CHECK(std::hypot(ce[0] - 0.4737, ce[1] - 0.5212) <= 0.1 * g.spacing(0));
  const PointVortex bad[] = {{{0.5, 0.5}, 1}};
  CHECK_THROWS_AS(periodic_vortex_field(g, bad), InvalidArgument);
}

TEST_CASE("circle reference") {
  CHECK(circle_reference(0.25, 0.0) == 0.25);
  CHECK(circle_reference(0.25, 0.01) == doctest::Approx(std::sqrt(0.0425)).epsilon(1e-15));
  CHECK(circle_reference(0.25, 0.01) == doctest::Approx(0.20616).epsilon(1e-5));
  CHECK_THROWS_AS(circle_reference(0.25, 0.03125), InvalidArgument);
}

TEST_CASE("pinning ODE") {
  const auto g = TorusGrid::cube(2, 64);
  const PinningPotential flat(ScalarField(g, 2.0));
  const auto still = pinning_ode({0.3, 0.7}, flat, 1.0, 0.01);
  CHECK(still.positions.back()[0] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(still.positions.back()[1] == doctest::Approx(0.7).epsilon(1e-14));
  CHECK_THROWS_AS(pinning_ode({0.3, 0.7}, flat, 1.0, 0.0), InvalidArgument);

  const PinningPotential a(sample_scalar(g, [](const Point& x) { return 1.0 + 0.25 * std::cos(2 * pi * x[0]); }));
  const auto crit = pinning_ode({0.5 + 0.5 * g.spacing(0), 0.4}, a, 0.5, 0.01);
  // A node-free critical point only up to interpolation; the true one is x = 1/2.
  CHECK(std::abs(crit.positions.back()[0] - 0.5) <= g.spacing(0));
  const auto exact = pinning_ode({0.5, 0.4}, a, 0.5, 0.01);
  CHECK(std::abs(exact.positions.back()[0] - 0.5) < 1e-3);

  const auto traj = pinning_ode({0.2, 0.4}, a, 1.0, 0.005);
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    CHECK(traj.times[i] > traj.times[i - 1]);
    CHECK(traj.positions[i][0] >= traj.positions[i - 1][0]);
    CHECK(traj.positions[i][0] < 0.5);
    CHECK(traj.positions[i][1] == doctest::Approx(0.4).epsilon(1e-12));
  }
  // Phase-line reference with the exact velocity 0.5 pi sin(2 pi x) / (1 + 0.25 cos(2 pi x)).
  const auto v = [](double x) { return 0.5 * pi * std::sin(2 * pi * x) / (1 + 0.25 * std::cos(2 * pi * x)); };
  double x = 0.2;
  const double dt = 1e-4;
  for (int i = 0; i < 10000; ++i) {
    const double k1 = v(x), k2 = v(x + 0.5 * dt * k1), k3 = v(x + 0.5 * dt * k2), k4 = v(x + dt * k3);
    x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  CHECK(traj.positions.back()[0] == doctest::Approx(x).epsilon(2e-3));
}

TEST_CASE("curve CSV round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "codim2_curve_test";
  std::filesystem::create_directories(dir);
  const auto c = Curve::circle({0.5, 0.5, 0.5}, 0.2, 1, 40, {1, 1, 1}, 1);
  write_curve_csv(c, dir / "c.csv");
  const auto r = read_curve_csv(dir / "c.csv");
  REQUIRE(r.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int a = 0; a < 3; ++a) CHECK(r.vertices()[i][a] == c.vertices()[i][a]);
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "x,y,z\n0,0,0\n";
  }
  CHECK_THROWS_AS(read_curve_csv(dir / "bad.csv"), FormatError);
  {
    std::ofstream few(dir / "few.csv");
    few << "axis0,axis1\n0.1,0.1\n0.2,0.1\n";
  }
  CHECK_THROWS_AS(read_curve_csv(dir / "few.csv"), FormatError);
  std::filesystem::remove_all(dir);
}
