#include "codim2/mbo.hpp"

#include <cmath>
#include <string>

#include "codim2/errors.hpp"
#include "codim2/simd.hpp"
#include "codim2/spectral.hpp"

namespace codim2 {
namespace {

void require_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw InvalidArgument("time step must be positive, got " + std::to_string(h));
}

void require_unit(const VectorField& u, const char* op) {
  const double dev = u.max_unit_deviation();
  if (dev > 1e-12)
    throw InvalidArgument(std::string(op) + ": input is not unit valued (max ||u|-1| = " +
                          std::to_string(dev) + ")");
}

void require_unit_on(const VectorField& u, const ScalarField& chi, double value, const char* what) {
  for (std::size_t k = 0; k < u.nodes(); ++k) {
    if (chi[k] != value) continue;
    double s = 0.0;
    for (int c = 0; c < u.codomain(); ++c) s += u.at(k, c) * u.at(k, c);
    if (std::abs(std::sqrt(s) - 1.0) > 1e-12)
      throw InvalidArgument(std::string(what) + " is not unit valued at node " + std::to_string(k));
  }
}

StepOutcome project_step(const VectorField& u, VectorField v) {
  std::vector<std::size_t> zeros;
  VectorField next = project_unit(v, kProjectionFloor, u, &zeros);
  return {std::move(next), std::move(v), std::move(zeros)};
}

}  // namespace

PinningPotential::PinningPotential(ScalarField a) : a_(std::move(a)), min_(a_.min()) {
  if (!(min_ > 0.0)) throw InvalidArgument("pinning potential must be positive, min a = " + std::to_string(min_));
}

VectorField project_unit(const VectorField& v, double floor, const VectorField& fallback,
                         std::vector<std::size_t>* zero_nodes) {
  if (!(floor > 0.0)) throw InvalidArgument("projection floor must be positive");
  if (!v.same_shape(fallback)) throw InvalidArgument("project_unit: fallback shape mismatch");
  const int N = v.codomain();
  VectorField out(v.grid(), N);
  std::vector<const double*> vp(N), fp(N);
  std::vector<double*> op(N);
  for (int c = 0; c < N; ++c) {
    vp[c] = v.component(c).data();
    fp[c] = fallback.component(c).data();
    op[c] = out.component(c).data();
  }
  std::vector<unsigned char> flag(v.nodes());
  simd::active().project(vp.data(), op.data(), fp.data(), N, v.nodes(), floor, flag.data());
  if (zero_nodes) {
    zero_nodes->clear();
    for (std::size_t k = 0; k < flag.size(); ++k)
      if (flag[k]) zero_nodes->push_back(k);
  }
  return out;
}

VectorField project_unit(const VectorField& v, double floor, std::span<const double> fallback,
                         std::vector<std::size_t>* zero_nodes) {
  if (static_cast<int>(fallback.size()) != v.codomain())
    throw InvalidArgument("project_unit: fallback has wrong length");
  return project_unit(v, floor, VectorField::constant(v.grid(), fallback), zero_nodes);
}

StepOutcome mbo_step(const VectorField& u, double h) {
  require_step(h);
  require_unit(u, "mbo_step");
  return project_step(u, heat_convolve(u, h));
}

StepOutcome hmhf_step(const VectorField& u, double h) {
  require_step(h);
  require_unit(u, "hmhf_step");
  return project_step(u, heat_convolve(u, h));
}

VectorField delta_h(const VectorField& u, double h) {
  require_step(h);
  VectorField r = heat_convolve(u, h) - u;
  for (double& x : r.planar()) x /= h;
  return r;
}

void validate_mask(const ScalarField& chi) {
  bool any = false;
  for (std::size_t k = 0; k < chi.size(); ++k) {
    if (chi[k] != 0.0 && chi[k] != 1.0)
      throw InvalidArgument("mask value at node " + std::to_string(k) + " is neither 0 nor 1");
    any = any || chi[k] == 1.0;
  }
  if (!any) throw InvalidArgument("mask is empty");
}

StepOutcome neumann_step(const VectorField& u, const ScalarField& chi, double h) {
  require_step(h);
  if (!(chi.grid() == u.grid())) throw InvalidArgument("neumann_step: mask grid mismatch");
  validate_mask(chi);
  require_unit_on(u, chi, 1.0, "neumann_step: u");
  StepOutcome out = project_step(u, heat_convolve(multiply(chi, u), h));
  std::vector<std::size_t> inside;
  for (std::size_t k : out.zero_nodes)
    if (chi[k] == 1.0) inside.push_back(k);
  out.zero_nodes = std::move(inside);
  for (int c = 0; c < u.codomain(); ++c) {
    auto x = out.u_next.component(c);
    for (std::size_t k = 0; k < x.size(); ++k)
      if (chi[k] == 0.0) x[k] = 0.0;
  }
  return out;
}

StepOutcome dirichlet_step(const VectorField& u, const ScalarField& chi, const VectorField& ubar, double h) {
  require_step(h);
  if (!(chi.grid() == u.grid())) throw InvalidArgument("dirichlet_step: mask grid mismatch");
  if (!ubar.same_shape(u)) throw InvalidArgument("dirichlet_step: boundary datum shape mismatch");
  validate_mask(chi);
  require_unit_on(ubar, chi, 0.0, "dirichlet_step: exterior datum");
  require_unit_on(u, chi, 1.0, "dirichlet_step: u");
  VectorField extended = u;
  for (int c = 0; c < u.codomain(); ++c) {
    auto x = extended.component(c);
    auto b = ubar.component(c);
    for (std::size_t k = 0; k < x.size(); ++k)
      if (chi[k] == 0.0) x[k] = b[k];
  }
  StepOutcome out = project_step(extended, heat_convolve(extended, h));
  std::vector<std::size_t> inside;
  for (std::size_t k : out.zero_nodes)
    if (chi[k] == 1.0) inside.push_back(k);
  out.zero_nodes = std::move(inside);
  for (int c = 0; c < u.codomain(); ++c) {
    auto x = out.u_next.component(c);
    auto b = ubar.component(c);
    for (std::size_t k = 0; k < x.size(); ++k)
      if (chi[k] == 0.0) x[k] = b[k];
  }
  return out;
}

StepOutcome pinning_step(const VectorField& u, const PinningPotential& a, double h) {
  require_step(h);
  if (u.grid().dim() != 2) throw InvalidArgument("pinning_step requires a 2-dimensional grid");
  if (!(a.a().grid() == u.grid())) throw InvalidArgument("pinning_step: potential grid mismatch");
  require_unit(u, "pinning_step");
  VectorField v = heat_convolve(multiply(a.a(), u), h) + multiply(a.a(), heat_convolve(u, h));
  return project_step(u, std::move(v));
}

}  // namespace codim2
