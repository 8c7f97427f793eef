#include <cmath>
#include <numbers>
#include <random>

#include "codim2/errors.hpp"
#include "codim2/spectral.hpp"
#include "internal.hpp"

namespace codim2::detail {

VectorField random_unit_field(const TorusGrid& grid, int codomain, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  VectorField u(grid, codomain);
  std::vector<double> v(codomain);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double s = 0.0;
    while (s < 1e-6) {
      s = 0.0;
      for (auto& x : v) {
        x = normal(rng);
        s += x * x;
      }
    }
    s = std::sqrt(s);
    for (int c = 0; c < codomain; ++c) u.at(k, c) = v[c] / s;
  }
  return u;
}

namespace {

VectorField random_trig_polynomial(const TorusGrid& grid, int codomain, std::uint64_t seed, int kmax) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  struct Mode {
    Index3 k;
    std::vector<double> a, b;
  };
  std::vector<Mode> modes;
  const int r0 = kmax, r1 = grid.dim() > 1 ? kmax : 0, r2 = grid.dim() > 2 ? kmax : 0;
  for (int i = -r0; i <= r0; ++i)
    for (int j = -r1; j <= r1; ++j)
      for (int l = -r2; l <= r2; ++l) {
        Mode m{{i, j, l}, std::vector<double>(codomain), std::vector<double>(codomain)};
        for (int c = 0; c < codomain; ++c) {
          m.a[c] = normal(rng);
          m.b[c] = normal(rng);
        }
        modes.push_back(std::move(m));
      }
  VectorField v = sample(grid, codomain, [&](const Point& x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& m : modes) {
      double phase = 0.0;
      for (int a = 0; a < grid.dim(); ++a) phase += 2.0 * std::numbers::pi * m.k[a] * x[a] / grid.period(a);
      const double cs = std::cos(phase), sn = std::sin(phase);
      for (int c = 0; c < codomain; ++c) out[c] += m.a[c] * cs + m.b[c] * sn;
    }
  });
  return v;
}

}  // namespace

VectorField random_smooth_field(const TorusGrid& grid, int codomain, std::uint64_t seed, int kmax) {
  std::vector<double> e1(codomain, 0.0);
  e1[0] = 1.0;
  return project_unit(random_trig_polynomial(grid, codomain, seed, kmax), kProjectionFloor, e1);
}

VectorField random_geodesic_field(const TorusGrid& grid, int codomain, std::uint64_t seed, int kmax, double angle) {
  const VectorField w = random_trig_polynomial(grid, codomain - 1, seed, kmax);
  double peak = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double s = 0.0;
    for (int c = 0; c + 1 < codomain; ++c) s += w.at(k, c) * w.at(k, c);
    peak = std::max(peak, std::sqrt(s));
  }
  const double scale = peak > 0.0 ? angle / peak : 0.0;
  VectorField u(grid, codomain);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double r2 = 0.0;
    for (int c = 0; c + 1 < codomain; ++c) r2 += w.at(k, c) * w.at(k, c);
    const double r = std::sqrt(r2) * scale;
    const double sinc = r > 0.0 ? std::sin(r) / r : 1.0;
    for (int c = 0; c + 1 < codomain; ++c) u.at(k, c) = sinc * scale * w.at(k, c);
    u.at(k, codomain - 1) = std::cos(r);
  }
  return u;
}

double polygon_radius(const Curve& c) {
  // Unwrapped vertices, with the closing vertex repeated at the end.
  std::vector<Point> p{c.segment_start(0)};
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point s = c.segment_vector(i);
    p.push_back({p.back()[0] + s[0], p.back()[1] + s[1], p.back()[2] + s[2]});
  }
  Point m{0, 0, 0};
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int a = 0; a < 3; ++a) m[a] += p[i][a] / static_cast<double>(c.size());
  Point A{0, 0, 0};
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point x{p[i][0] - m[0], p[i][1] - m[1], p[i][2] - m[2]};
    const Point y{p[i + 1][0] - m[0], p[i + 1][1] - m[1], p[i + 1][2] - m[2]};
    A[0] += 0.5 * (x[1] * y[2] - x[2] * y[1]);
    A[1] += 0.5 * (x[2] * y[0] - x[0] * y[2]);
    A[2] += 0.5 * (x[0] * y[1] - x[1] * y[0]);
  }
  return std::sqrt(std::hypot(A[0], A[1], A[2]) / std::numbers::pi);
}

namespace {

std::vector<std::vector<ScalarField>> hessian(const ScalarField& phi) {
  const Spectrum s(phi);
  const int d = phi.grid().dim();
  std::vector<std::vector<ScalarField>> H(d, std::vector<ScalarField>(d, ScalarField(phi.grid())));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      H[i][j] = s.second_derivative_scalar(0.0, i, j);
      if (j != i) H[j][i] = H[i][j];
    }
  return H;
}

}  // namespace

Localization localize(const SimulationConfig& cfg, double t) {
  const TorusGrid g = cfg.grid();
  const auto curves = reference_curves(cfg, t);
  if (!curves) throw InvalidArgument("localize: no reference curve for this configuration");
  Localization out{ScalarField(g), {}};
  if (cfg.initial.kind == "circle") {
    const LocalizationProfile f(cfg.sigma);
    const double R = circle_reference(cfg.initial.R0, t);
    const int n = cfg.initial.normal_axis, a1 = (n + 1) % 3, a2 = (n + 2) % 3;
    const Point c = cfg.initial.center;
    for (int j = 0; j < 3; ++j) out.xi.xi.emplace_back(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point r = g.displacement(c, g.position(k));
      const double rho = std::hypot(r[a1], r[a2]);
      const double d = std::hypot(rho - R, r[n]);
      out.phi[k] = 0.5 * f.value(d);
      if (d == 0.0 || rho == 0.0) continue;
      const double s = 0.5 * f.derivative(d) / d;
      out.xi.xi[a1][k] = s * (rho - R) * r[a1] / rho;
      out.xi.xi[a2][k] = s * (rho - R) * r[a2] / rho;
      out.xi.xi[n][k] = s * r[n];
    }
  } else {
    out.phi = phi_sigma(g, *curves, cfg.sigma);
    out.xi.xi = localization_gradient(g, *curves, cfg.sigma);
  }
  out.xi.dxi = hessian(out.phi);
  return out;
}

ScalarField bump(const TorusGrid& grid, const Point& c, double r) {
  return sample_scalar(grid, [&](const Point& x) {
    const Point d = grid.displacement(c, x);
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) s += d[a] * d[a];
    s /= r * r;
    return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
  });
}

}  // namespace codim2::detail
