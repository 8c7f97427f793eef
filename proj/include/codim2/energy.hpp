#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "codim2/grid.hpp"

namespace codim2 {

struct EnergyReport {
  double e_h = 0.0;
  double e_h_localized = 0.0;
  double dirichlet_mollified = 0.0;
  double metric_term = 0.0;
  double h = 0.0;
};

/// (1/h) \int mask (1 - u . G_h * u) dx; mask defaults to 1.
double e_h(const VectorField& u, double h);
double e_h(const VectorField& u, double h, const ScalarField& mask);

/// (1/h) \int psi (1 - u . G_h * u) dx.
double e_h_localized(const VectorField& u, const ScalarField& psi, double h);

/// (1/h) sum_k (1 - exp(-4 pi^2 h |k/L|^2)) |u^(k)|^2, normalized as an integral.
double e_h_fourier(const VectorField& u, double h);

/// Tensor Gauss-Hermite rule for the kernel G_1 (variance 2 per axis).
struct Quadrature {
  int dim = 0;
  std::vector<Point> nodes;
  std::vector<double> weights;  // sum to 1
};
Quadrature gauss_hermite_rule(int dim, int points_per_axis);

/// (1/2) \int psi(x) sum_z w(z) |(u(x) - u(x - sqrt(h) z)) / sqrt(h)|^2 dx, with u
/// sampled off-grid by periodic multilinear interpolation.
double finite_difference_form(const VectorField& u, const ScalarField& psi, double h, const Quadrature& q);

/// \int mask |grad G_{h/2} * u|^2 dx.
double dirichlet_mollified(const VectorField& u, double h);
double dirichlet_mollified(const VectorField& u, double h, const ScalarField& mask);

/// (2/h) \int_0^{h/2} \int |grad G_t * u|^2 dx dt by Gauss-Legendre in t.
double time_averaged_dirichlet(const VectorField& u, double h, int points = 64);

/// (1/h) \int (u - w) . G_h * (u - w) dx. With a mask the difference is
/// restricted to the mask on both sides: (1/h) \int chi d . G_h * (chi d).
double metric_term(const VectorField& u, const VectorField& w, double h);
double metric_term(const VectorField& u, const VectorField& w, double h, const ScalarField& mask);

/// (1/h) \int a (u - w) . G_h * (u - w) dx, the metric of the weighted energy.
double weighted_metric_term(const VectorField& u, const VectorField& w, double h, const ScalarField& a);

struct MonotonicityResult {
  double e_coarse;   // E_{N^2 h}
  double e_fine;     // E_h
  bool monotone;     // e_coarse <= e_fine + 1e-11
  bool per_mode_ok;  // expm1(s) - s >= 0 for s = 4 pi^2 h |k/L|^2 on the whole spectrum
};
MonotonicityResult monotonicity_check(const VectorField& u, double h, int N);

/// (E_{N^2 h}(u, psi) - E_h(u, psi)) / (|grad psi|_inf N sqrt(h) E_h(u)); the
/// localized monotonicity defect in units of its expected scale.
double localized_monotonicity_ratio(const VectorField& u, const ScalarField& psi, double h, int N);

/// (1/sqrt h) \int_{chi=1} \int_{chi=0} G_h(x - y) (1 - u(x) . ubar(y)) dy dx.
double dirichlet_penalization(const VectorField& u, const VectorField& ubar, const ScalarField& chi, double h);

struct LedgerRow {
  std::size_t step;
  double e_h;
  double metric;           // (1/h) \int (u^n - u^{n-1}) . G_h * (u^n - u^{n-1})
  double dissipation_cum;  // sum of metric terms up to this step
  double excess;           // e_h + metric - e_h(previous)
  bool ok;                 // excess <= 1e-11
};

struct DissipationLedger {
  std::vector<LedgerRow> rows;  // rows[0] is the initial state
  bool cumulative_ok = true;    // E(u^n) + cum <= E(u^0) + n 1e-11 for every n
  double time_derivative_sq = 0.0;  // \int_0^T \int |d_t^h u|^2
  double a_priori_ratio = 0.0;      // time_derivative_sq / ((1 + T/h) E_h(u^0))
};
DissipationLedger dissipation_ledger(std::span<const VectorField> states, double h);

/// Smooth test vector field xi with its first derivatives d_i xi_j.
struct TestVectorField {
  std::vector<ScalarField> xi;                // xi[j]
  std::vector<std::vector<ScalarField>> dxi;  // dxi[i][j] = d_i xi_j
};
/// Derivatives taken spectrally.
TestVectorField make_test_vector_field(std::vector<ScalarField> xi);
TestVectorField constant_test_vector_field(const TorusGrid& grid, const Point& value);

struct InnerTerms {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const { return lhs - rhs; }
};

/// Contribution of the step u_prev -> u (time integral over one interval).
InnerTerms el_inner_step(const VectorField& u_prev, const VectorField& u, double h, const TestVectorField& xi);
double el_outer_weak_step(const VectorField& u_prev, const VectorField& u, double h, const ScalarField& zeta,
                          int i, int j);

/// Time-summed residuals over consecutive states; test fields may depend on t.
double el_inner_residual(std::span<const VectorField> states, double h, const TestVectorField& xi);
double el_inner_residual(std::span<const VectorField> states, double h,
                         const std::function<TestVectorField(double)>& xi_at);
double el_outer_weak_residual(std::span<const VectorField> states, double h, const ScalarField& zeta, int i, int j);
double el_outer_weak_residual(std::span<const VectorField> states, double h,
                              const std::function<ScalarField(double)>& zeta_at, int i, int j);

struct GronwallSample {
  double time;
  double localized_energy;  // E_h(u^n, phi(t_n))
  double running_max;
  double dissipation_cum;   // sum_m (1/h) \int phi |G_{h/2} * (u^m - u^{m-1})|^2
};

/// Streams states one at a time.
class GronwallMonitor {
 public:
  GronwallMonitor(double h, std::function<ScalarField(double)> phi_at);
  void push(const VectorField& u);
  const std::vector<GronwallSample>& samples() const noexcept { return samples_; }
  double max() const noexcept { return samples_.empty() ? 0.0 : samples_.back().running_max; }

 private:
  double h_;
  std::function<ScalarField(double)> phi_at_;
  std::vector<GronwallSample> samples_;
  std::optional<VectorField> previous_;
};

std::vector<GronwallSample> gronwall_monitor(std::span<const VectorField> states, double h,
                                             const std::function<ScalarField(double)>& phi_at);

}  // namespace codim2
