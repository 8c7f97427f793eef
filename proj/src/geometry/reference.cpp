#include <cmath>
#include <string>

#include "codim2/errors.hpp"
#include "codim2/geometry.hpp"
#include "codim2/spectral.hpp"

namespace codim2 {
namespace {

// Periodic bilinear interpolation of a cell-centered 2-D field.
double bilinear(const ScalarField& f, const std::array<double, 2>& x) {
  const TorusGrid& grid = f.grid();
  int base[2];
  double frac[2];
  for (int a = 0; a < 2; ++a) {
    const double s = x[a] / grid.spacing(a) - 0.5;
    const double fl = std::floor(s);
    base[a] = static_cast<int>(fl);
    frac[a] = s - fl;
  }
  double v = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double w = (i ? frac[0] : 1.0 - frac[0]) * (j ? frac[1] : 1.0 - frac[1]);
      v += w * f[grid.index({base[0] + i, base[1] + j, 0})];
    }
  return v;
}

}  // namespace

double circle_reference(double R0, double t) {
  if (!(R0 > 0.0)) throw InvalidArgument("circle_reference: R0 must be positive");
  if (!(t >= 0.0)) throw InvalidArgument("circle_reference: t must be non-negative");
  if (t >= 0.5 * R0 * R0)
    throw InvalidArgument("circle_reference: circle is extinct at t = " + std::to_string(0.5 * R0 * R0));
  return std::sqrt(R0 * R0 - 2.0 * t);
}

PinningTrajectory pinning_ode(const std::array<double, 2>& X0, const PinningPotential& a, double T, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("pinning_ode: dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("pinning_ode: T must be non-negative");
  const ScalarField& field = a.a();
  if (field.grid().dim() != 2) throw InvalidArgument("pinning_ode: potential must live on a 2-torus");
  const Spectrum s(field);
  const ScalarField g0 = s.derivative_scalar(0.0, 0);
  const ScalarField g1 = s.derivative_scalar(0.0, 1);
  const auto velocity = [&](const std::array<double, 2>& x) {
    const double inv = 1.0 / bilinear(field, x);
    return std::array<double, 2>{-bilinear(g0, x) * inv, -bilinear(g1, x) * inv};
  };
  const auto wrapped = [&](std::array<double, 2> x) {
    for (int i = 0; i < 2; ++i) x[i] -= field.grid().period(i) * std::floor(x[i] / field.grid().period(i));
    return x;
  };
  const auto along = [](const std::array<double, 2>& x, const std::array<double, 2>& v, double s) {
    return std::array<double, 2>{x[0] + s * v[0], x[1] + s * v[1]};
  };

  PinningTrajectory traj;
  traj.times.push_back(0.0);
  traj.positions.push_back(wrapped(X0));
  std::array<double, 2> x = X0;
  double t = 0.0;
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  for (long n = 0; n < steps; ++n) {
    const double tau = std::min(dt, T - t);
    const auto k1 = velocity(wrapped(x));
    const auto k2 = velocity(wrapped(along(x, k1, 0.5 * tau)));
    const auto k3 = velocity(wrapped(along(x, k2, 0.5 * tau)));
    const auto k4 = velocity(wrapped(along(x, k3, tau)));
    for (int i = 0; i < 2; ++i) x[i] += tau / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = n + 1 == steps ? T : t + tau;
    traj.times.push_back(t);
    traj.positions.push_back(wrapped(x));
  }
  return traj;
}

}  // namespace codim2
