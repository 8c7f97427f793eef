#include <cmath>
#include <limits>

#include "codim2/errors.hpp"
#include "codim2/geometry.hpp"
#include "segment.hpp"

namespace codim2 {
namespace {

// Quintic blend on s in [0, 1]: g(0) = 1, g'(0) = 2, g''(0) = 2, g(1) = 4, g'(1) = g''(1) = 0.
double blend(double s) { return 1.0 + s * (2.0 + s * (1.0 + s * (15.0 + s * (-26.0 + s * 11.0)))); }
double blend_d1(double s) { return 2.0 + s * (2.0 + s * (45.0 + s * (-104.0 + s * 55.0))); }
double blend_d2(double s) { return 2.0 + s * (90.0 + s * (-312.0 + s * 220.0)); }

struct NearestField {
  std::vector<double> distance;
  std::vector<Point> offset;
};

// Distance and offset to the nearest curve point for every node within
// `cutoff`; other nodes keep distance = cutoff.
NearestField nearest_field(const TorusGrid& grid, std::span<const Curve> curves, double cutoff) {
  NearestField f{std::vector<double>(grid.size(), cutoff), std::vector<Point>(grid.size(), Point{0.0, 0.0, 0.0})};
  const int dim = grid.dim();
  for (const Curve& c : curves) {
    if (c.dim() != dim) throw InvalidArgument("curve dimension does not match the grid");
    for (int a = 0; a < dim; ++a)
      if (c.period()[a] != grid.period(a)) throw InvalidArgument("curve period does not match the grid");
    for (std::size_t s = 0; s < c.size(); ++s) {
      const Point a0 = c.segment_start(s);
      const Point v = c.segment_vector(s);
      Index3 lo{0, 0, 0}, count{1, 1, 1};
      bool full[3] = {false, false, false};
      for (int a = 0; a < dim; ++a) {
        const double h = grid.spacing(a);
        const double x0 = std::min(a0[a], a0[a] + v[a]) - cutoff;
        const double x1 = std::max(a0[a], a0[a] + v[a]) + cutoff;
        lo[a] = static_cast<int>(std::ceil(x0 / h - 0.5));
        const int hi = static_cast<int>(std::floor(x1 / h - 0.5));
        count[a] = hi - lo[a] + 1;
        if (count[a] >= grid.resolution(a)) {
          full[a] = true;
          lo[a] = 0;
          count[a] = grid.resolution(a);
        }
      }
      for (int i = 0; i < count[0]; ++i)
        for (int j = 0; j < count[1]; ++j)
          for (int k = 0; k < count[2]; ++k) {
            const Index3 node{lo[0] + i, lo[1] + j, lo[2] + k};
            Point w{0.0, 0.0, 0.0};
            for (int a = 0; a < dim; ++a) {
              const double y = (node[a] + 0.5) * grid.spacing(a);
              // Full axes take the image nearest the segment midpoint.
              w[a] = full[a] ? detail::wrap(y - a0[a] - 0.5 * v[a], grid.period(a)) + 0.5 * v[a] : y - a0[a];
            }
            const auto hit = detail::segment_nearest(w, v, dim);
            const std::size_t idx = grid.index(node);
            if (hit.distance < f.distance[idx]) {
              f.distance[idx] = hit.distance;
              f.offset[idx] = hit.offset;
            }
          }
    }
  }
  return f;
}

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidArgument("sigma must be positive, got " + std::to_string(sigma));
}

}  // namespace

LocalizationProfile::LocalizationProfile(double sigma) : sigma_(sigma) { require_sigma(sigma); }

double LocalizationProfile::value(double rho) const noexcept {
  if (rho < sigma_) return rho * rho;
  if (rho > 2.0 * sigma_) return 4.0 * sigma_ * sigma_;
  return sigma_ * sigma_ * blend((rho - sigma_) / sigma_);
}

double LocalizationProfile::derivative(double rho) const noexcept {
  if (rho < sigma_) return 2.0 * rho;
  if (rho > 2.0 * sigma_) return 0.0;
  return sigma_ * blend_d1((rho - sigma_) / sigma_);
}

double LocalizationProfile::second_derivative(double rho) const noexcept {
  if (rho < sigma_) return 2.0;
  if (rho > 2.0 * sigma_) return 0.0;
  return blend_d2((rho - sigma_) / sigma_);
}

ScalarField distance_field(const TorusGrid& grid, std::span<const Curve> curves, double cutoff) {
  if (!(cutoff > 0.0)) throw InvalidArgument("distance cutoff must be positive");
  return ScalarField(grid, nearest_field(grid, curves, cutoff).distance);
}

ScalarField phi_sigma(const TorusGrid& grid, const Curve& c, double sigma) {
  return phi_sigma(grid, std::span<const Curve>(&c, 1), sigma);
}

ScalarField phi_sigma(const TorusGrid& grid, std::span<const Curve> curves, double sigma) {
  const LocalizationProfile f(sigma);
  ScalarField d = distance_field(grid, curves, 2.0 * sigma);
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = 0.5 * f.value(d[k]);
  return d;
}

std::vector<ScalarField> localization_gradient(const TorusGrid& grid, std::span<const Curve> curves, double sigma) {
  const LocalizationProfile f(sigma);
  const NearestField nf = nearest_field(grid, curves, 2.0 * sigma);
  std::vector<ScalarField> xi(grid.dim(), ScalarField(grid));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d = nf.distance[k];
    const double ratio = d < sigma ? 1.0 : 0.5 * f.derivative(d) / d;
    for (int a = 0; a < grid.dim(); ++a) xi[a][k] = ratio * nf.offset[k][a];
  }
  return xi;
}

}  // namespace codim2
