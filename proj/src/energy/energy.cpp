#include "codim2/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "codim2/errors.hpp"
#include "codim2/simd.hpp"
#include "codim2/spectral.hpp"

namespace codim2 {
namespace {

constexpr double kFourPi2 = 4.0 * std::numbers::pi * std::numbers::pi;

void require_step(double h, const char* op) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw InvalidArgument(std::string(op) + ": h must be positive, got " + std::to_string(h));
}

void require_grid(const TorusGrid& a, const TorusGrid& b, const char* op) {
  if (!(a == b)) throw InvalidArgument(std::string(op) + ": grid mismatch");
}

// Nodewise 1 - u . w.
ScalarField deficit(const VectorField& u, const VectorField& w) {
  ScalarField d(u.grid(), 1.0);
  for (int c = 0; c < u.codomain(); ++c) {
    auto uc = u.component(c);
    auto wc = w.component(c);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= uc[k] * wc[k];
  }
  return d;
}

double weighted_integral(const ScalarField& weight, const ScalarField& f) {
  return simd::dot(weight.values(), f.values()) * f.grid().cell_volume();
}

}  // namespace

double e_h(const VectorField& u, double h) {
  require_step(h, "e_h");
  return integrate(deficit(u, heat_convolve(u, h))) / h;
}

double e_h(const VectorField& u, double h, const ScalarField& mask) {
  require_step(h, "e_h");
  require_grid(u.grid(), mask.grid(), "e_h");
  return weighted_integral(mask, deficit(u, heat_convolve(u, h))) / h;
}

double e_h_localized(const VectorField& u, const ScalarField& psi, double h) {
  require_step(h, "e_h_localized");
  require_grid(u.grid(), psi.grid(), "e_h_localized");
  return weighted_integral(psi, deficit(u, heat_convolve(u, h))) / h;
}

double e_h_fourier(const VectorField& u, double h) {
  require_step(h, "e_h_fourier");
  return Spectrum(u).power([h](double q) { return -std::expm1(-kFourPi2 * h * q); }) / h;
}

double dirichlet_mollified(const VectorField& u, double h) {
  require_step(h, "dirichlet_mollified");
  const Spectrum s(u);
  double total = 0.0;
  for (int a = 0; a < u.grid().dim(); ++a) {
    const VectorField g = s.derivative(h / 2, a);
    total += dot_integral(g, g);
  }
  return total;
}

double dirichlet_mollified(const VectorField& u, double h, const ScalarField& mask) {
  require_step(h, "dirichlet_mollified");
  require_grid(u.grid(), mask.grid(), "dirichlet_mollified");
  const Spectrum s(u);
  double total = 0.0;
  for (int a = 0; a < u.grid().dim(); ++a) {
    const VectorField g = s.derivative(h / 2, a);
    total += weighted_dot_integral(mask, g, g);
  }
  return total;
}

double metric_term(const VectorField& u, const VectorField& w, double h) {
  require_step(h, "metric_term");
  const VectorField d = u - w;
  return dot_integral(d, heat_convolve(d, h)) / h;
}

double metric_term(const VectorField& u, const VectorField& w, double h, const ScalarField& mask) {
  require_step(h, "metric_term");
  require_grid(u.grid(), mask.grid(), "metric_term");
  const VectorField d = multiply(mask, u - w);
  return dot_integral(d, heat_convolve(d, h)) / h;
}

double weighted_metric_term(const VectorField& u, const VectorField& w, double h, const ScalarField& a) {
  require_step(h, "weighted_metric_term");
  require_grid(u.grid(), a.grid(), "weighted_metric_term");
  const VectorField d = u - w;
  return weighted_dot_integral(a, d, heat_convolve(d, h)) / h;
}

MonotonicityResult monotonicity_check(const VectorField& u, double h, int N) {
  require_step(h, "monotonicity_check");
  if (N < 2) throw InvalidArgument("monotonicity_check: N must be >= 2");
  MonotonicityResult r{};
  r.e_fine = e_h(u, h);
  r.e_coarse = e_h(u, static_cast<double>(N) * N * h);
  r.monotone = r.e_coarse <= r.e_fine + 1e-11;
  const HalfSpectrum spec(u.grid());
  r.per_mode_ok = true;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double s = kFourPi2 * h * spec.squared_frequency(i);
    if (std::expm1(s) - s < 0.0) r.per_mode_ok = false;
  }
  return r;
}

double localized_monotonicity_ratio(const VectorField& u, const ScalarField& psi, double h, int N) {
  require_step(h, "localized_monotonicity_ratio");
  double grad_max = 0.0;
  const Spectrum sp(psi);
  std::vector<ScalarField> grad;
  for (int a = 0; a < psi.grid().dim(); ++a) grad.push_back(sp.derivative_scalar(0.0, a));
  for (std::size_t k = 0; k < psi.size(); ++k) {
    double s = 0.0;
    for (const auto& g : grad) s += g[k] * g[k];
    grad_max = std::max(grad_max, std::sqrt(s));
  }
  const double scale = grad_max * N * std::sqrt(h) * e_h(u, h);
  if (scale == 0.0) return 0.0;
  const double coarse = e_h_localized(u, psi, static_cast<double>(N) * N * h);
  return (coarse - e_h_localized(u, psi, h)) / scale;
}

double dirichlet_penalization(const VectorField& u, const VectorField& ubar, const ScalarField& chi, double h) {
  require_step(h, "dirichlet_penalization");
  if (!u.same_shape(ubar)) throw InvalidArgument("dirichlet_penalization: shape mismatch");
  require_grid(u.grid(), chi.grid(), "dirichlet_penalization");
  ScalarField outside(chi.grid());
  for (std::size_t k = 0; k < chi.size(); ++k) outside[k] = 1.0 - chi[k];
  const ScalarField g_out = heat_convolve(outside, h);
  const VectorField g_ubar = heat_convolve(multiply(outside, ubar), h);
  ScalarField integrand(chi.grid());
  for (std::size_t k = 0; k < chi.size(); ++k) {
    double dot = 0.0;
    for (int c = 0; c < u.codomain(); ++c) dot += u.at(k, c) * g_ubar.at(k, c);
    integrand[k] = g_out[k] - dot;
  }
  return weighted_integral(chi, integrand) / std::sqrt(h);
}

}  // namespace codim2
