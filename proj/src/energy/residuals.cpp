#include <cmath>
#include <string>

#include "codim2/energy.hpp"
#include "codim2/errors.hpp"
#include "codim2/spectral.hpp"

namespace codim2 {
namespace {

void require_states(std::span<const VectorField> states, const char* op) {
  if (states.size() < 2) throw InvalidArgument(std::string(op) + ": need at least 2 states");
  for (const auto& s : states)
    if (!s.same_shape(states[0])) throw InvalidArgument(std::string(op) + ": states differ in shape");
}

}  // namespace

DissipationLedger dissipation_ledger(std::span<const VectorField> states, double h) {
  require_states(states, "dissipation_ledger");
  DissipationLedger ledger;
  const double e0 = e_h(states[0], h);
  ledger.rows.push_back({0, e0, 0.0, 0.0, 0.0, true});
  double cum = 0.0, previous = e0;
  for (std::size_t n = 1; n < states.size(); ++n) {
    const double e = e_h(states[n], h);
    const double m = metric_term(states[n], states[n - 1], h);
    cum += m;
    const double excess = e + m - previous;
    ledger.rows.push_back({n, e, m, cum, excess, excess <= 1e-11});
    if (e + cum > e0 + static_cast<double>(n) * 1e-11) ledger.cumulative_ok = false;
    const VectorField d = states[n] - states[n - 1];
    ledger.time_derivative_sq += dot_integral(d, d) / h;
    previous = e;
  }
  const double T = static_cast<double>(states.size() - 1) * h;
  ledger.a_priori_ratio = e0 > 0.0 ? ledger.time_derivative_sq / ((1.0 + T / h) * e0) : 0.0;
  return ledger;
}

TestVectorField make_test_vector_field(std::vector<ScalarField> xi) {
  if (xi.empty()) throw InvalidArgument("test vector field needs components");
  const TorusGrid& g = xi[0].grid();
  if (static_cast<int>(xi.size()) != g.dim())
    throw InvalidArgument("test vector field must have one component per axis");
  TestVectorField t;
  t.dxi.assign(g.dim(), {});
  for (int j = 0; j < g.dim(); ++j) {
    const Spectrum s(xi[j]);
    for (int i = 0; i < g.dim(); ++i) t.dxi[i].push_back(s.derivative_scalar(0.0, i));
  }
  t.xi = std::move(xi);
  return t;
}

TestVectorField constant_test_vector_field(const TorusGrid& grid, const Point& value) {
  TestVectorField t;
  for (int j = 0; j < grid.dim(); ++j) t.xi.emplace_back(grid, value[j]);
  t.dxi.assign(grid.dim(), std::vector<ScalarField>(grid.dim(), ScalarField(grid)));
  return t;
}

InnerTerms el_inner_step(const VectorField& u_prev, const VectorField& u, double h, const TestVectorField& xi) {
  if (!(h > 0.0)) throw InvalidArgument("el_inner_step: h must be positive");
  if (!u.same_shape(u_prev)) throw InvalidArgument("el_inner_step: shape mismatch");
  const TorusGrid& g = u.grid();
  const int d = g.dim();
  if (static_cast<int>(xi.xi.size()) != d || !(xi.xi[0].grid() == g))
    throw InvalidArgument("el_inner_step: test field grid mismatch");

  const Spectrum su(u);
  std::vector<VectorField> grad;
  for (int a = 0; a < d; ++a) grad.push_back(su.derivative(h / 2, a));

  // LHS: 2 \int G_{h/2} * (u - u_prev) . (xi . grad) G_{h/2} * u.
  VectorField transport(g, u.codomain());
  for (int a = 0; a < d; ++a) transport = transport + multiply(xi.xi[a], grad[a]);
  const VectorField smoothed_step = heat_convolve(u - u_prev, h / 2);
  InnerTerms terms;
  terms.lhs = 2.0 * dot_integral(smoothed_step, transport);

  // RHS: \int (div xi)(1 - u . G_h * u) - 2h sum_ij \int d_i xi_j d_i G u . d_j G u.
  const VectorField gu = su.filtered(h);
  ScalarField div(g), deficit(g, 1.0);
  for (int a = 0; a < d; ++a)
    for (std::size_t k = 0; k < g.size(); ++k) div[k] += xi.dxi[a][a][k];
  for (int c = 0; c < u.codomain(); ++c)
    for (std::size_t k = 0; k < g.size(); ++k) deficit[k] -= u.at(k, c) * gu.at(k, c);
  double rhs = integrate(div * deficit);
  double stress = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) stress += weighted_dot_integral(xi.dxi[i][j], grad[i], grad[j]);
  terms.rhs = rhs - 2.0 * h * stress;
  return terms;
}

double el_outer_weak_step(const VectorField& u_prev, const VectorField& u, double h, const ScalarField& zeta,
                          int i, int j) {
  if (i == j) throw InvalidArgument("el_outer_weak: component indices must differ");
  if (i < 0 || j < 0 || i >= u.codomain() || j >= u.codomain())
    throw InvalidArgument("el_outer_weak: component index out of range");
  if (!(h > 0.0)) throw InvalidArgument("el_outer_weak: h must be positive");
  if (!u.same_shape(u_prev) || !(zeta.grid() == u.grid())) throw InvalidArgument("el_outer_weak: shape mismatch");
  const TorusGrid& g = u.grid();
  const VectorField gd = heat_convolve(u - u_prev, h);
  ScalarField first(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    first[k] = u.at(k, j) * gd.at(k, i) - u.at(k, i) * gd.at(k, j);
  double value = integrate(first * zeta);

  const Spectrum su(u), sz(zeta);
  double second = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const ScalarField dz = sz.derivative_scalar(0.0, a);
    const ScalarField dui = su.derivative_scalar(h, a, i);
    const ScalarField duj = su.derivative_scalar(h, a, j);
    ScalarField flux(g);
    for (std::size_t k = 0; k < g.size(); ++k) flux[k] = u.at(k, j) * dui[k] - u.at(k, i) * duj[k];
    second += integrate(flux * dz);
  }
  return value + h * second;
}

double el_inner_residual(std::span<const VectorField> states, double h,
                         const std::function<TestVectorField(double)>& xi_at) {
  require_states(states, "el_inner_residual");
  double total = 0.0;
  for (std::size_t n = 1; n < states.size(); ++n)
    total += el_inner_step(states[n - 1], states[n], h, xi_at(static_cast<double>(n) * h)).residual();
  return total;
}

double el_inner_residual(std::span<const VectorField> states, double h, const TestVectorField& xi) {
  return el_inner_residual(states, h, [&](double) { return xi; });
}

double el_outer_weak_residual(std::span<const VectorField> states, double h,
                              const std::function<ScalarField(double)>& zeta_at, int i, int j) {
  if (i == j) throw InvalidArgument("el_outer_weak: component indices must differ");
  require_states(states, "el_outer_weak_residual");
  double total = 0.0;
  for (std::size_t n = 1; n < states.size(); ++n)
    total += el_outer_weak_step(states[n - 1], states[n], h, zeta_at(static_cast<double>(n) * h), i, j);
  return total;
}

double el_outer_weak_residual(std::span<const VectorField> states, double h, const ScalarField& zeta, int i, int j) {
  return el_outer_weak_residual(states, h, [&](double) { return zeta; }, i, j);
}

GronwallMonitor::GronwallMonitor(double h, std::function<ScalarField(double)> phi_at)
    : h_(h), phi_at_(std::move(phi_at)) {
  if (!(h > 0.0)) throw InvalidArgument("GronwallMonitor: h must be positive");
}

void GronwallMonitor::push(const VectorField& u) {
  const double t = static_cast<double>(samples_.size()) * h_;
  const ScalarField phi = phi_at_(t);
  GronwallSample s{t, e_h_localized(u, phi, h_), 0.0, 0.0};
  if (previous_) {
    const VectorField smoothed = heat_convolve(u - *previous_, h_ / 2);
    s.dissipation_cum = samples_.back().dissipation_cum + weighted_dot_integral(phi, smoothed, smoothed) / h_;
    s.running_max = std::max(samples_.back().running_max, s.localized_energy);
  } else {
    s.running_max = s.localized_energy;
  }
  samples_.push_back(s);
  previous_ = u;
}

std::vector<GronwallSample> gronwall_monitor(std::span<const VectorField> states, double h,
                                             const std::function<ScalarField(double)>& phi_at) {
  GronwallMonitor m(h, phi_at);
  for (const auto& u : states) m.push(u);
  return m.samples();
}

}  // namespace codim2
