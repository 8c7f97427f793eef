#pragma once

#include <cstdint>

#include "codim2/grid.hpp"

namespace codim2::testing {

// Independent reference computations used only by tests.

// Nodewise i.i.d. Gaussian vectors normalized to unit length (rough field).
VectorField random_unit_field(const TorusGrid& grid, int codomain, std::uint64_t seed);

// Unit field obtained by normalizing a random trigonometric polynomial with
// modes |k_i| <= kmax; smooth whenever the polynomial stays away from 0.
VectorField smooth_unit_field(const TorusGrid& grid, int codomain, std::uint64_t seed, int kmax = 2);

// (cos theta, sin theta) with theta a random trigonometric polynomial of
// amplitude `amplitude`; smooth everywhere, no vortices.
VectorField smooth_phase_field(const TorusGrid& grid, std::uint64_t seed, int kmax = 2, double amplitude = 1.0);

// (cos 2 pi x_axis / L, sin 2 pi x_axis / L), padded with zeros to `codomain`.
VectorField plane_wave(const TorusGrid& grid, int axis = 0, int codomain = 2);

// Real-space convolution with the periodized Gaussian of variance 2t,
// images summed until the tail is below 1e-18. O(N^2); small grids only.
VectorField wrapped_gaussian_convolve(const VectorField& u, double t);

}  // namespace codim2::testing
