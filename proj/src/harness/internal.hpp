#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "codim2/energy.hpp"
#include "codim2/geometry.hpp"
#include "codim2/grid.hpp"
#include "codim2/harness.hpp"

namespace codim2::detail {

// Nodewise i.i.d. Gaussian vectors normalized to unit length.
VectorField random_unit_field(const TorusGrid& grid, int codomain, std::uint64_t seed);

// Normalized random trigonometric polynomial with modes |k_i| <= kmax.
VectorField random_smooth_field(const TorusGrid& grid, int codomain, std::uint64_t seed, int kmax);

// Exponential map at the last basis vector of a random tangent trigonometric
// polynomial, scaled so the largest geodesic distance is `angle`.
VectorField random_geodesic_field(const TorusGrid& grid, int codomain, std::uint64_t seed, int kmax, double angle);

// R = sqrt(|A| / pi) for the area vector of a closed polyline.
double polygon_radius(const Curve& c);

// phi_sigma of a reference configuration at one time, with xi = grad phi and
// its derivatives. Circles are evaluated in closed form, other curves by
// rasterization.
struct Localization {
  ScalarField phi;
  TestVectorField xi;
};
Localization localize(const SimulationConfig& cfg, double t);

// Smooth bump of radius r around c: exp(1 - 1 / (1 - |x - c|^2 / r^2)) inside.
ScalarField bump(const TorusGrid& grid, const Point& c, double r);

}  // namespace codim2::detail
