#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "codim2/energy.hpp"
#include "codim2/errors.hpp"
#include "codim2/spectral.hpp"

namespace codim2 {
namespace {

// Periodic multilinear interpolation of component c at an arbitrary point.
double interpolate(const VectorField& u, int c, const Point& x) {
  const TorusGrid& g = u.grid();
  const int d = g.dim();
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    const double s = x[a] / g.spacing(a) - 0.5;
    const double f = std::floor(s);
    base[a] = static_cast<int>(f);
    frac[a] = s - f;
  }
  const auto values = u.component(c);
  double result = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    Index3 idx{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const int bit = (corner >> a) & 1;
      idx[a] = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    result += w * values[g.index(idx)];
  }
  return result;
}

}  // namespace

Quadrature gauss_hermite_rule(int dim, int points_per_axis) {
  if (dim < 1 || dim > 3 || points_per_axis < 1) throw InvalidArgument("gauss_hermite_rule: bad arguments");
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, points_per_axis, 0.0, 1.0, 0.0, 0.0),
      gsl_integration_fixed_free);
  const double* x = gsl_integration_fixed_nodes(ws.get());
  const double* w = gsl_integration_fixed_weights(ws.get());
  // G_1(z) dz = pi^{-1/2} exp(-s^2) ds with z = 2 s.
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  Quadrature q;
  q.dim = dim;
  const int n = points_per_axis;
  const int total = dim == 1 ? n : dim == 2 ? n * n : n * n * n;
  for (int t = 0; t < total; ++t) {
    Point z{0.0, 0.0, 0.0};
    double weight = 1.0;
    int rest = t;
    for (int a = 0; a < dim; ++a) {
      const int i = rest % n;
      rest /= n;
      z[a] = 2.0 * x[i];
      weight *= norm * w[i];
    }
    q.nodes.push_back(z);
    q.weights.push_back(weight);
  }
  return q;
}

double finite_difference_form(const VectorField& u, const ScalarField& psi, double h, const Quadrature& q) {
  if (q.nodes.empty()) throw InvalidArgument("finite_difference_form: empty quadrature");
  if (!(h > 0.0)) throw InvalidArgument("finite_difference_form: h must be positive");
  if (!(psi.grid() == u.grid())) throw InvalidArgument("finite_difference_form: grid mismatch");
  if (q.dim != u.grid().dim()) throw InvalidArgument("finite_difference_form: quadrature dimension mismatch");
  const TorusGrid& g = u.grid();
  const double root_h = std::sqrt(h);
  ScalarField integrand(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (psi[k] == 0.0) continue;
    const Point x = g.position(k);
    double s = 0.0;
    for (std::size_t m = 0; m < q.nodes.size(); ++m) {
      Point y = x;
      for (int a = 0; a < g.dim(); ++a) y[a] -= root_h * q.nodes[m][a];
      double sq = 0.0;
      for (int c = 0; c < u.codomain(); ++c) {
        const double diff = u.at(k, c) - interpolate(u, c, y);
        sq += diff * diff;
      }
      s += q.weights[m] * sq;
    }
    integrand[k] = 0.5 * psi[k] * s / h;
  }
  return integrate(integrand);
}

double time_averaged_dirichlet(const VectorField& u, double h, int points) {
  if (!(h > 0.0)) throw InvalidArgument("time_averaged_dirichlet: h must be positive");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(points), gsl_integration_glfixed_table_free);
  const Spectrum s(u);
  double total = 0.0;
  for (int i = 0; i < points; ++i) {
    double t = 0.0, w = 0.0;
    gsl_integration_glfixed_point(0.0, h / 2, i, &t, &w, table.get());
    double dirichlet = 0.0;
    for (int a = 0; a < u.grid().dim(); ++a) {
      const VectorField g = s.derivative(t, a);
      dirichlet += dot_integral(g, g);
    }
    total += w * dirichlet;
  }
  return 2.0 * total / h;
}

}  // namespace codim2
