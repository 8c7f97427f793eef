#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <numbers>
#include <queue>

#include "../spectral/fft.hpp"
#include "codim2/errors.hpp"
#include "codim2/geometry.hpp"
#include "codim2/spectral.hpp"
#include "segment.hpp"

namespace codim2 {
namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mollifier_width(const TorusGrid& grid) { return 1.5 * grid.max_spacing(); }

// Adds weight * G_sigma(x - p) (Gaussian of standard deviation sigma) to f.
void deposit(ScalarField& f, const Point& p, double weight, double sigma) {
  const TorusGrid& grid = f.grid();
  const int dim = grid.dim();
  std::array<std::vector<double>, 3> factor;
  Index3 lo{0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      factor[a] = {1.0};
      continue;
    }
    const double h = grid.spacing(a);
    const double r = 8.0 * sigma;
    lo[a] = static_cast<int>(std::ceil((p[a] - r) / h - 0.5));
    const int hi = static_cast<int>(std::floor((p[a] + r) / h - 0.5));
    const double norm = 1.0 / (std::sqrt(kTwoPi) * sigma);
    for (int j = lo[a]; j <= hi; ++j) {
      const double z = ((j + 0.5) * h - p[a]) / sigma;
      factor[a].push_back(norm * std::exp(-0.5 * z * z));
    }
  }
  for (std::size_t i = 0; i < factor[0].size(); ++i)
    for (std::size_t j = 0; j < factor[1].size(); ++j) {
      const double fij = weight * factor[0][i] * factor[1][j];
      for (std::size_t k = 0; k < factor[2].size(); ++k)
        f[grid.index({lo[0] + static_cast<int>(i), lo[1] + static_cast<int>(j), lo[2] + static_cast<int>(k)})] +=
            fij * factor[2][k];
    }
}

std::vector<cplx> forward(const ScalarField& f) {
  const Spectrum s(f);
  const auto c = s.coefficients(0);
  return {c.begin(), c.end()};
}

ScalarField inverse(const TorusGrid& grid, std::vector<cplx> coeffs) {
  const auto& plan = detail::fft_plan(grid);
  fftw_complex* work = detail::alloc_complex(plan.complex_size);
  double* real = detail::alloc_real(plan.real_size);
  std::memcpy(work, coeffs.data(), sizeof(fftw_complex) * plan.complex_size);
  fftw_execute_dft_c2r(plan.backward, work, real);
  ScalarField out(grid);
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = real[k] * inv_n;
  detail::release(work);
  detail::release(real);
  return out;
}

bool any_nyquist(const TorusGrid& grid, const Index3& q) {
  for (int a = 0; a < grid.dim(); ++a)
    if (q[a] == grid.resolution(a) / 2) return true;
  return false;
}

// Line integrals of the spectral 1-form g over every grid edge x -> x + h_i e_i,
// shifted by a constant per axis so that each axis cycle through `root`
// closes to a multiple of 2 pi.
std::vector<ScalarField> edge_increments(const TorusGrid& grid, const std::vector<std::vector<cplx>>& g_hat,
                                         std::size_t root) {
  const HalfSpectrum spec(grid);
  std::vector<ScalarField> inc;
  for (int i = 0; i < grid.dim(); ++i) {
    std::vector<cplx> c = g_hat[i];
    const double h = grid.spacing(i);
    for (std::size_t m = 0; m < spec.size(); ++m) {
      const Index3 q = spec.mode(m);
      const double kappa = q[i] / grid.period(i);
      const cplx mult = kappa == 0.0 ? cplx(h, 0.0)
                                     : (std::exp(cplx(0.0, kTwoPi * kappa * h)) - 1.0) / cplx(0.0, kTwoPi * kappa);
      c[m] *= mult;
    }
    ScalarField e = inverse(grid, std::move(c));
    double cycle = 0.0;
    std::size_t node = root;
    for (int j = 0; j < grid.resolution(i); ++j) {
      cycle += e[node];
      node = grid.shifted(node, i, 1);
    }
    const double shift = (kTwoPi * std::round(cycle / kTwoPi) - cycle) / grid.resolution(i);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] += shift;
    inc.push_back(std::move(e));
  }
  return inc;
}

// Phase by integrating edge increments along a shortest-path tree from the
// root, with edges through high circulation density made expensive.
VectorField phase_field(const TorusGrid& grid, const std::vector<ScalarField>& inc, const ScalarField& density,
                        std::size_t root) {
  const double peak = std::max(density.max(), 1e-300);
  const auto cost = [&](std::size_t a, std::size_t b) {
    return 1.0 + 1000.0 * 0.5 * (density[a] + density[b]) / peak;
  };
  const std::size_t n = grid.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<double> theta(n, 0.0);
  std::vector<std::size_t> parent(n, n);
  std::vector<double> parent_inc(n, 0.0);
  std::vector<char> done(n, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[root] = 0.0;
  queue.push({0.0, root});
  while (!queue.empty()) {
    const auto [d, k] = queue.top();
    queue.pop();
    if (done[k]) continue;
    done[k] = 1;
    if (parent[k] != n) theta[k] = theta[parent[k]] + parent_inc[k];
    for (int i = 0; i < grid.dim(); ++i)
      for (int dir : {1, -1}) {
        const std::size_t nb = grid.shifted(k, i, dir);
        if (done[nb]) continue;
        const double nd = d + cost(k, nb);
        if (nd < dist[nb]) {
          dist[nb] = nd;
          parent[nb] = k;
          parent_inc[nb] = dir > 0 ? inc[i][k] : -inc[i][nb];
          queue.push({nd, nb});
        }
      }
  }
  VectorField u(grid, 2);
  for (std::size_t k = 0; k < n; ++k) {
    u.at(k, 0) = std::cos(theta[k]);
    u.at(k, 1) = std::sin(theta[k]);
  }
  return u;
}

std::size_t quietest_node(const ScalarField& density) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < density.size(); ++k)
    if (density[k] < density[best]) best = k;
  return best;
}

VectorField constant_phase(const TorusGrid& grid) {
  const double one[2] = {1.0, 0.0};
  return VectorField::constant(grid, one);
}

}  // namespace

VectorField analytic_filament_field(const TorusGrid& grid, const GraphCurve& gamma, int sign) {
  if (grid.dim() < 2) throw InvalidArgument("analytic_filament_field: grid must be 2- or 3-dimensional");
  if (sign != 1 && sign != -1) throw InvalidArgument("analytic_filament_field: sign must be +1 or -1");
  const bool three = grid.dim() == 3;
  VectorField u(grid, 2);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point x = grid.position(k);
    const auto g = gamma(three ? x[2] : 0.0);
    const double w0 = x[0] - g[0];
    const double w1 = x[1] - g[1];
    const double r = std::hypot(w0, w1);
    if (!(r > 0.0))
      throw InvalidArgument("analytic_filament_field: node " + std::to_string(k) + " lies on the curve");
    u.at(k, 0) = sign * (-w1 / r);
    u.at(k, 1) = sign * (w0 / r);
  }
  return u;
}

VectorField periodic_filament_field(const TorusGrid& grid, std::span<const Curve> curves) {
  if (grid.dim() != 3) throw InvalidArgument("periodic_filament_field: grid must be 3-dimensional");
  if (curves.empty()) return constant_phase(grid);
  std::array<double, 3> net{0.0, 0.0, 0.0};
  for (const Curve& c : curves) {
    if (c.dim() != 3) throw InvalidArgument("periodic_filament_field: curves must be 3-dimensional");
    for (int a = 0; a < 3; ++a)
      if (c.period()[a] != grid.period(a)) throw InvalidArgument("periodic_filament_field: curve period mismatch");
    for (std::size_t s = 0; s < c.size(); ++s) {
      const Point v = c.segment_vector(s);
      for (int a = 0; a < 3; ++a) net[a] += c.orientation() * v[a];
    }
  }
  for (int a = 0; a < 3; ++a)
    if (std::abs(net[a]) > 1e-9 * grid.period(a))
      throw TopologyError("periodic_filament_field: curves carry net circulation " +
                              std::to_string(net[a] / grid.period(a)) + " around axis " + std::to_string(a),
                          a);

  const double sigma = mollifier_width(grid);
  const double step = 0.25 * std::min({grid.spacing(0), grid.spacing(1), grid.spacing(2)});
  std::vector<ScalarField> J(3, ScalarField(grid));
  for (const Curve& c : curves)
    for (std::size_t s = 0; s < c.size(); ++s) {
      const Point a = c.segment_start(s);
      const Point v = c.segment_vector(s);
      const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      const int m = std::max(1, static_cast<int>(std::ceil(len / step)));
      for (int j = 0; j < m; ++j) {
        const double tau = (j + 0.5) / m;
        const Point p{a[0] + tau * v[0], a[1] + tau * v[1], a[2] + tau * v[2]};
        for (int i = 0; i < 3; ++i)
          if (v[i] != 0.0) deposit(J[i], p, c.orientation() * v[i] / m, sigma);
      }
    }

  ScalarField density(grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    density[k] = std::sqrt(J[0][k] * J[0][k] + J[1][k] * J[1][k] + J[2][k] * J[2][k]);

  // g = i (kappa x J^) / |kappa|^2, so that curl g = 2 pi J.
  const HalfSpectrum spec(grid);
  std::vector<std::vector<cplx>> jh;
  for (int i = 0; i < 3; ++i) jh.push_back(forward(J[i]));
  std::vector<std::vector<cplx>> gh(3, std::vector<cplx>(spec.size()));
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const Index3 q = spec.mode(m);
    if (any_nyquist(grid, q)) continue;
    const std::array<double, 3> kap{q[0] / grid.period(0), q[1] / grid.period(1), q[2] / grid.period(2)};
    const double k2 = kap[0] * kap[0] + kap[1] * kap[1] + kap[2] * kap[2];
    if (k2 == 0.0) continue;
    const cplx f(0.0, 1.0 / k2);
    gh[0][m] = f * (kap[1] * jh[2][m] - kap[2] * jh[1][m]);
    gh[1][m] = f * (kap[2] * jh[0][m] - kap[0] * jh[2][m]);
    gh[2][m] = f * (kap[0] * jh[1][m] - kap[1] * jh[0][m]);
  }
  const std::size_t root = quietest_node(density);
  return phase_field(grid, edge_increments(grid, gh, root), density, root);
}

VectorField periodic_vortex_field(const TorusGrid& grid, std::span<const PointVortex> vortices) {
  if (grid.dim() != 2) throw InvalidArgument("periodic_vortex_field: grid must be 2-dimensional");
  if (vortices.empty()) return constant_phase(grid);
  int total = 0;
  for (const auto& v : vortices) total += v.degree;
  if (total != 0)
    throw InvalidArgument("periodic_vortex_field: degrees sum to " + std::to_string(total) + ", must be 0");

  const double sigma = mollifier_width(grid);
  ScalarField omega(grid);
  for (const auto& v : vortices) deposit(omega, {v.position[0], v.position[1], 0.0}, v.degree, sigma);
  ScalarField density(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) density[k] = std::abs(omega[k]);

  // -Laplace psi = omega, g = 2 pi (d_1 psi, -d_0 psi).
  const HalfSpectrum spec(grid);
  const auto wh = forward(omega);
  std::vector<std::vector<cplx>> gh(2, std::vector<cplx>(spec.size()));
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const Index3 q = spec.mode(m);
    if (any_nyquist(grid, q)) continue;
    const double k0 = q[0] / grid.period(0);
    const double k1 = q[1] / grid.period(1);
    const double k2 = k0 * k0 + k1 * k1;
    if (k2 == 0.0) continue;
    const cplx psi = wh[m] / (kTwoPi * kTwoPi * k2);
    gh[0][m] = kTwoPi * cplx(0.0, kTwoPi * k1) * psi;
    gh[1][m] = -kTwoPi * cplx(0.0, kTwoPi * k0) * psi;
  }
  const std::size_t root = quietest_node(density);
  return phase_field(grid, edge_increments(grid, gh, root), density, root);
}

}  // namespace codim2
