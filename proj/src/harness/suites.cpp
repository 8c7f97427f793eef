#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "codim2/energy.hpp"
#include "codim2/errors.hpp"
#include "codim2/harness.hpp"
#include "codim2/spectral.hpp"
#include "internal.hpp"

namespace codim2 {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kRandomFields = 20;

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  void reset() { start_ = Clock::now(); }

 private:
  Clock::time_point start_ = Clock::now();
};

SuiteCheck check_at_most(std::string name, double value, double bound, Timer& t) {
  SuiteCheck c{std::move(name), value, bound, value <= bound, t.seconds()};
  t.reset();
  return c;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

VectorField plane_wave(const TorusGrid& g, int axis, int codomain) {
  return sample(g, codomain, [&](const Point& x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double th = 2.0 * kPi * x[axis] / g.period(axis);
    out[0] = std::cos(th);
    out[1] = std::sin(th);
  });
}

std::vector<VectorField> random_fields(const TorusGrid& g, std::uint64_t seed) {
  std::vector<VectorField> out;
  for (int i = 0; i < kRandomFields; ++i) out.push_back(detail::random_unit_field(g, 2, seed * 1000 + i));
  return out;
}

// max |(Id - u (x) u)(G_h (u - u_prev) / h - Delta_h u)| after one step.
double strong_outer_residual(const VectorField& u_prev, double h) {
  const VectorField u = mbo_step(u_prev, h).u_next;
  VectorField a = heat_convolve(u - u_prev, h);
  for (double& x : a.planar()) x /= h;
  const VectorField r = a - delta_h(u, h);
  double worst = 0.0;
  for (std::size_t k = 0; k < u.nodes(); ++k) {
    double dot = 0.0;
    for (int c = 0; c < u.codomain(); ++c) dot += r.at(k, c) * u.at(k, c);
    for (int c = 0; c < u.codomain(); ++c) worst = std::max(worst, std::abs(r.at(k, c) - dot * u.at(k, c)));
  }
  return worst;
}

std::vector<SuiteCheck> identities(std::uint64_t seed) {
  std::vector<SuiteCheck> out;
  Timer t;
  const TorusGrid cube = TorusGrid::cube(3, 64);
  const VectorField wave = plane_wave(cube, 0, 2);
  double worst = 0.0;
  for (double h : {1e-3, 1e-2, 1e-1}) worst = std::max(worst, relative(e_h(wave, h), -std::expm1(-4 * kPi * kPi * h) / h));
  out.push_back(check_at_most("plane_wave_energy", worst, 1e-10, t));

  const TorusGrid sq = TorusGrid::cube(2, 128);
  const auto fields = random_fields(sq, seed);
  const double h = 1e-3;
  worst = 0.0;
  for (const auto& u : fields) worst = std::max(worst, relative(e_h(u, h), e_h_fourier(u, h)));
  out.push_back(check_at_most("fourier_energy", worst, 1e-10, t));

  worst = 0.0;
  for (const auto& u : fields) worst = std::max(worst, strong_outer_residual(u, h));
  out.push_back(check_at_most("strong_outer_el", worst, 1e-11, t));

  worst = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const VectorField& u = fields[i];
    const VectorField& w = fields[(i + 1) % fields.size()];
    const VectorField half = heat_convolve(u - w, h / 2);
    worst = std::max(worst, relative(metric_term(u, w, h), dot_integral(half, half) / h));
  }
  out.push_back(check_at_most("metric_identity", worst, 1e-12, t));

  const VectorField f = detail::random_unit_field(cube, 2, seed + 7);
  const VectorField q = detail::random_unit_field(cube, 2, seed + 8);
  const double s1 = 3e-4, s2 = 5e-4;
  const double semigroup = max_abs_difference(heat_convolve(heat_convolve(f, s1), s2), heat_convolve(f, s1 + s2));
  const double adjoint = relative(dot_integral(heat_convolve(f, s1), q), dot_integral(f, heat_convolve(q, s1)));
  out.push_back(check_at_most("semigroup_selfadjoint", std::max(semigroup, adjoint), 1e-12, t));
  return out;
}

std::vector<SuiteCheck> monotonicity(std::uint64_t seed) {
  std::vector<SuiteCheck> out;
  Timer t;
  const TorusGrid sq = TorusGrid::cube(2, 128);
  auto fields = random_fields(sq, seed);
  fields.push_back(plane_wave(sq, 0, 2));

  std::vector<double> hs;
  for (int k = 4; k < 16; ++k) hs.push_back(std::ldexp(1.0, -k));
  double rise = -std::numeric_limits<double>::infinity();
  for (const auto& u : fields)
    for (std::size_t i = 1; i < hs.size(); ++i) rise = std::max(rise, e_h(u, hs[i - 1]) - e_h(u, hs[i]));
  out.push_back(check_at_most("energy_decreasing_in_h", rise, 1e-9, t));

  double coarse_excess = -std::numeric_limits<double>::infinity();
  bool per_mode = true;
  for (const auto& u : fields)
    for (double h : hs) {
      const MonotonicityResult r = monotonicity_check(u, h, 2);
      coarse_excess = std::max(coarse_excess, r.e_coarse - r.e_fine);
      per_mode = per_mode && r.per_mode_ok;
    }
  out.push_back(check_at_most("four_h_not_above_h", coarse_excess, 0.0, t));
  out.push_back(check_at_most("per_mode_inequality", per_mode ? 0.0 : 1.0, 0.0, t));

  double sharp = -std::numeric_limits<double>::infinity();
  for (const auto& u : fields)
    for (double h : hs) sharp = std::max(sharp, dirichlet_mollified(u, h) - e_h(u, h));
  out.push_back(check_at_most("sharp_dirichlet_bound", sharp, 1e-11, t));
  return out;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

SuiteCheck in_range(std::string name, double value, double lo, double hi, Timer& t) {
  SuiteCheck c{std::move(name), value, hi, value >= lo && value <= hi, t.seconds()};
  t.reset();
  return c;
}

std::vector<SuiteCheck> el(std::uint64_t seed) {
  std::vector<SuiteCheck> out;
  Timer t;
  const TorusGrid sq = TorusGrid::cube(2, 128);
  const auto fields = random_fields(sq, seed);
  double worst = 0.0;
  for (const auto& u : fields)
    for (double h : {1e-3, 1e-2}) worst = std::max(worst, strong_outer_residual(u, h));
  out.push_back(check_at_most("strong_outer_el", worst, 1e-11, t));

  // A stationary field with a constant test field has vanishing weak residuals.
  const VectorField wave = plane_wave(sq, 0, 2);
  const VectorField states[] = {wave, mbo_step(wave, 1e-3).u_next};
  const double inner = el_inner_residual(states, 1e-3, constant_test_vector_field(sq, {0.3, -0.7, 0.0}));
  const double outer = el_outer_weak_residual(states, 1e-3, ScalarField(sq, 1.0), 0, 1);
  out.push_back(check_at_most("stationary_weak_residuals", std::max(std::abs(inner), std::abs(outer)), 1e-11, t));

  // Commutator expansion (1/t)[G_{t/2}, psi] u ~ grad psi . grad G_{t/2} u.
  const ScalarField psi = sample_scalar(sq, [](const Point& x) { return std::sin(2 * kPi * x[0]); });
  const ScalarField lap = sample_scalar(sq, [](const Point& x) { return -4 * kPi * kPi * std::sin(2 * kPi * x[0]); });
  const Spectrum sp(psi);
  std::vector<ScalarField> dpsi;
  for (int a = 0; a < 2; ++a) dpsi.push_back(sp.derivative_scalar(0.0, a));
  const VectorField u = sample(sq, 2, [](const Point& x, std::span<double> o) {
    const double th = std::sin(2 * kPi * x[0]) + 0.5 * std::cos(2 * kPi * x[1]);
    o[0] = std::cos(th);
    o[1] = std::sin(th);
  });
  std::vector<double> ts, first, second;
  for (int k = 10; k <= 16; ++k) {
    const double tt = std::ldexp(1.0, -k);
    const VectorField c = commutator(psi, u, tt / 2);
    const auto grad = grad_heat_convolve(u, tt / 2);
    const VectorField gu = heat_convolve(u, tt / 2);
    double r1 = 0.0, r2 = 0.0;
    for (std::size_t n = 0; n < sq.size(); ++n)
      for (int comp = 0; comp < 2; ++comp) {
        double lead = 0.0;
        for (int a = 0; a < 2; ++a) lead += dpsi[a][n] * grad[a].at(n, comp);
        const double rem = c.at(n, comp) / tt - lead;
        r1 += std::abs(rem);
        r2 += std::abs(rem - 0.5 * lap[n] * gu.at(n, comp));
      }
    ts.push_back(tt);
    first.push_back(r1 * sq.cell_volume());
    second.push_back(r2 * sq.cell_volume());
  }
  out.push_back(in_range("commutator_first_order_slope", fitted_slope(ts, first), 0.8, 1.2, t));
  out.push_back(in_range("commutator_second_order_slope", fitted_slope(ts, second), 0.8, 1.2, t));
  return out;
}

// 4th-order central differences, RK4 in time, for u_t = Lap u + |grad u|^2 u.
VectorField hmhf_oracle(VectorField u, double T, double dt) {
  const TorusGrid& g = u.grid();
  const int N = u.codomain();
  auto rhs = [&](const VectorField& x) {
    VectorField r(g, N);
    std::vector<double> grad2(g.size(), 0.0);
    std::vector<std::vector<double>> lap(N, std::vector<double>(g.size(), 0.0));
    for (int a = 0; a < g.dim(); ++a) {
      const double dx = g.spacing(a);
      for (std::size_t k = 0; k < g.size(); ++k) {
        const std::size_t m1 = g.shifted(k, a, -1), p1 = g.shifted(k, a, 1);
        const std::size_t m2 = g.shifted(k, a, -2), p2 = g.shifted(k, a, 2);
        for (int c = 0; c < N; ++c) {
          const double d1 = (8 * (x.at(p1, c) - x.at(m1, c)) - (x.at(p2, c) - x.at(m2, c))) / (12 * dx);
          const double d2 =
              (-x.at(p2, c) + 16 * x.at(p1, c) - 30 * x.at(k, c) + 16 * x.at(m1, c) - x.at(m2, c)) / (12 * dx * dx);
          grad2[k] += d1 * d1;
          lap[c][k] += d2;
        }
      }
    }
    for (std::size_t k = 0; k < g.size(); ++k)
      for (int c = 0; c < N; ++c) r.at(k, c) = lap[c][k] + grad2[k] * x.at(k, c);
    return r;
  };
  const int steps = static_cast<int>(std::lround(T / dt));
  for (int s = 0; s < steps; ++s) {
    const VectorField k1 = rhs(u);
    const VectorField k2 = rhs(u + (dt / 2) * k1);
    const VectorField k3 = rhs(u + (dt / 2) * k2);
    const VectorField k4 = rhs(u + dt * k3);
    u = u + (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

std::vector<SuiteCheck> variants(std::uint64_t seed) {
  std::vector<SuiteCheck> out;
  Timer t;

  // Pinning: dipole drift against -grad a / a over the first 20 steps, net of
  // the drift of the same dipole under a = 1.
  SimulationConfig pin;
  pin.variant = Variant::pinning;
  pin.dim = 2;
  pin.resolution = {128, 128, 1};
  pin.h = 5e-4;
  pin.steps = 20;
  pin.initial.kind = "dipole";
  pin.diagnostics.extraction_every = 0;
  const double dx = 1.0 / 128;
  auto drift = [&](bool invert, double amplitude) {
    SimulationConfig c = pin;
    c.potential.invert = invert;
    c.potential.amplitude = amplitude;
    std::array<double, 2> start{}, end{};
    run(c, {false, [&](const VectorField& u, std::size_t step) {
          if (step == 0) start = vortex_centroid(u, dx * dx, c.initial.p, 0.1);
          if (step == 20) end = vortex_centroid(u, dx * dx, c.initial.p, 0.1);
        }});
    return std::array<double, 2>{end[0] - start[0], end[1] - start[1]};
  };
  const double A = pin.potential.amplitude;
  const std::array<double, 2> base = drift(false, 0.0), pinned = drift(false, A), inverted = drift(true, A);
  const std::array<double, 2> forward{pinned[0] - base[0], pinned[1] - base[1]};
  const std::array<double, 2> backward{inverted[0] - base[0], inverted[1] - base[1]};
  const double x1 = pin.initial.p[0];
  const double a = 1.0 + pin.potential.amplitude * std::cos(2 * kPi * x1);
  const double law = 2 * kPi * pin.potential.amplitude * std::sin(2 * kPi * x1) / a;  // -d_1 a / a
  const double cosine = forward[0] * law / (std::hypot(forward[0], forward[1]) * std::abs(law));
  out.push_back(in_range("pinning_drift_angle_deg", std::acos(std::clamp(cosine, -1.0, 1.0)) * 180 / kPi, 0.0, 30.0, t));
  out.push_back(check_at_most("pinning_reversal", forward[0] * backward[0] >= 0.0 ? 1.0 : -1.0, 0.0, t));

  // Dirichlet: penalization on a slab against its surface limit.
  const TorusGrid sq = TorusGrid::cube(2, 512);
  const double lo = 0.25, hi = 0.75;
  auto theta = [](double x0, double x1) { return 0.5 * std::sin(2 * kPi * x1) + 0.3 * std::cos(2 * kPi * x0); };
  auto theta_bar = [](double, double x1) { return 0.4 * std::cos(2 * kPi * x1); };
  const VectorField u = sample(sq, 2, [&](const Point& x, std::span<double> o) {
    o[0] = std::cos(theta(x[0], x[1]));
    o[1] = std::sin(theta(x[0], x[1]));
  });
  const VectorField ubar = sample(sq, 2, [&](const Point& x, std::span<double> o) {
    o[0] = std::cos(theta_bar(x[0], x[1]));
    o[1] = std::sin(theta_bar(x[0], x[1]));
  });
  const ScalarField chi = sample_scalar(sq, [&](const Point& x) { return x[0] >= lo && x[0] < hi ? 1.0 : 0.0; });
  double limit = 0.0;
  const int M = 4096;
  for (double face : {lo, hi})
    for (int i = 0; i < M; ++i) {
      const double y = (i + 0.5) / M;
      limit += (1.0 - std::cos(theta(face, y) - theta_bar(face, y))) / M;
    }
  limit /= std::sqrt(kPi);
  double worst = 0.0;
  for (int k = 9; k <= 14; ++k) worst = std::max(worst, relative(dirichlet_penalization(u, ubar, chi, std::ldexp(1.0, -k)), limit));
  out.push_back(check_at_most("dirichlet_surface_limit", worst, 0.05, t));

  // Harmonic map heat flow against a finite-difference solution.
  SimulationConfig hm;
  hm.variant = Variant::hmhf;
  hm.dim = 2;
  hm.resolution = {64, 64, 1};
  hm.codomain = 3;
  hm.h = 1e-4;
  hm.steps = 50;
  hm.seed = seed;
  hm.initial.kind = "random_geodesic";
  hm.diagnostics.extraction_every = 0;
  std::optional<VectorField> first, last;
  const RunRecord r = run(hm, {false, [&](const VectorField& x, std::size_t step) {
                                 if (step == 0) first = x;
                                 if (step == 50) last = x;
                               }});
  out.push_back(check_at_most("hmhf_energy_nonincreasing", r.energy_nonincreasing ? 0.0 : 1.0, 0.0, t));
  const VectorField oracle = hmhf_oracle(*first, hm.h * hm.steps, hm.h / 4);
  const VectorField diff = *last - oracle;
  out.push_back(check_at_most("hmhf_oracle_l2", std::sqrt(dot_integral(diff, diff)), 0.05, t));
  return out;
}

}  // namespace

std::vector<SuiteCheck> run_suite(std::string_view suite, std::uint64_t seed) {
  if (suite == "identities") return identities(seed);
  if (suite == "monotonicity") return monotonicity(seed);
  if (suite == "el") return el(seed);
  if (suite == "variants") return variants(seed);
  throw InvalidArgument("unknown suite '" + std::string(suite) + "'");
}

}  // namespace codim2
