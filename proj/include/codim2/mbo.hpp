#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "codim2/grid.hpp"

namespace codim2 {

inline constexpr double kProjectionFloor = 1e-12;

struct StepOutcome {
  VectorField u_next;
  VectorField v;                        // diffused field before projection
  std::vector<std::size_t> zero_nodes;  // |v| < floor; previous value kept
};

/// Positive weight a(x) >= a0 > 0 of the pinned vortex energy.
class PinningPotential {
 public:
  explicit PinningPotential(ScalarField a);
  const ScalarField& a() const noexcept { return a_; }
  double minimum() const noexcept { return min_; }

 private:
  ScalarField a_;
  double min_;
};

/// v / |v| nodewise; nodes with |v| < floor take `fallback` and are listed.
VectorField project_unit(const VectorField& v, double floor, std::span<const double> fallback,
                         std::vector<std::size_t>* zero_nodes = nullptr);
VectorField project_unit(const VectorField& v, double floor, const VectorField& fallback,
                         std::vector<std::size_t>* zero_nodes = nullptr);

/// One thresholding step: v = G_h * u, u_next = v / |v|.
StepOutcome mbo_step(const VectorField& u, double h);

/// (G_h * u - u) / h.
VectorField delta_h(const VectorField& u, double h);

/// Domain given by a 0/1 mask `chi`. The field is extended by zero, diffused,
/// and projected on chi = 1; exterior nodes of u_next are zero.
StepOutcome neumann_step(const VectorField& u, const ScalarField& chi, double h);

/// Exterior nodes take the boundary datum ubar before diffusion and after.
StepOutcome dirichlet_step(const VectorField& u, const ScalarField& chi, const VectorField& ubar, double h);

/// v = G_h * (a u) + a G_h * u on the 2-torus.
StepOutcome pinning_step(const VectorField& u, const PinningPotential& a, double h);

/// Thresholding for maps into S^{N-1}; identical arithmetic to mbo_step.
StepOutcome hmhf_step(const VectorField& u, double h);

/// Throws unless every value of chi is exactly 0 or 1 and at least one is 1.
void validate_mask(const ScalarField& chi);

}  // namespace codim2
