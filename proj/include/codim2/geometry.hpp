#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "codim2/grid.hpp"
#include "codim2/mbo.hpp"

namespace codim2 {

/// Closed polyline on the torus. Consecutive vertices (and last to first) are
/// joined by their shortest periodic segment, so each must be less than half
/// a period apart per axis. A curve may wrap around the torus.
class Curve {
 public:
  Curve(std::vector<Point> vertices, int dim, std::array<double, 3> period, int orientation = 1);

  /// Circle in the plane orthogonal to `normal_axis`, counterclockwise about it.
  static Curve circle(const Point& center, double radius, int normal_axis, int vertices,
                      std::array<double, 3> period = {1, 1, 1}, int orientation = 1);
  /// Straight line through `through` parallel to `axis`, traversed in +axis direction.
  static Curve line(int axis, const Point& through, int vertices, std::array<double, 3> period = {1, 1, 1},
                    int orientation = 1);

  int dim() const noexcept { return dim_; }
  const std::array<double, 3>& period() const noexcept { return period_; }
  int orientation() const noexcept { return orientation_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }

  /// Start of segment i and its displacement to the next vertex.
  Point segment_start(std::size_t i) const noexcept { return vertices_[i]; }
  Point segment_vector(std::size_t i) const noexcept;

  double length() const;
  /// Net number of times the curve wraps around each axis.
  std::array<int, 3> lattice_winding() const;

 private:
  std::vector<Point> vertices_;
  int dim_;
  std::array<double, 3> period_;
  int orientation_;
};

/// Periodic distance from x to the polyline.
double distance_to_curve(const Point& x, const Curve& c);

/// Smooth truncation of rho^2: rho^2 below sigma, 4 sigma^2 above 2 sigma, and a
/// quintic C^2 monotone blend in between.
class LocalizationProfile {
 public:
  explicit LocalizationProfile(double sigma);
  double sigma() const noexcept { return sigma_; }
  double value(double rho) const noexcept;
  double derivative(double rho) const noexcept;
  double second_derivative(double rho) const noexcept;

 private:
  double sigma_;
};

/// phi = f_sigma(d(x, curves)) / 2 at every node.
ScalarField phi_sigma(const TorusGrid& grid, const Curve& c, double sigma);
ScalarField phi_sigma(const TorusGrid& grid, std::span<const Curve> curves, double sigma);

/// grad phi_sigma, one field per axis, from the nearest-point construction.
std::vector<ScalarField> localization_gradient(const TorusGrid& grid, std::span<const Curve> curves, double sigma);

/// Distance from every node to the union of curves, exact up to `cutoff`;
/// nodes farther away hold `cutoff`.
ScalarField distance_field(const TorusGrid& grid, std::span<const Curve> curves, double cutoff);

/// +-(x' - gamma(x_3))^perp / |x' - gamma(x_3)| with (a, b)^perp = (-b, a), in raw
/// coordinates (not periodic across the x' faces). On a 2-torus gamma is
/// evaluated at 0. Axis 2 is the curve parameter in 3D.
using GraphCurve = std::function<std::array<double, 2>(double)>;
VectorField analytic_filament_field(const TorusGrid& grid, const GraphCurve& gamma, int sign);

/// Exactly periodic S^1 field winding once around each curve (in the sense of
/// its orientation). Throws TopologyError if the curves carry net flux
/// around some axis.
VectorField periodic_filament_field(const TorusGrid& grid, std::span<const Curve> curves);

struct PointVortex {
  std::array<double, 2> position;
  int degree;
};
/// 2-torus analogue: field with the given point vortices; degrees must sum to 0.
VectorField periodic_vortex_field(const TorusGrid& grid, std::span<const PointVortex> vortices);

struct WindingResult {
  int winding;
  double defect;   // distance of the raw phase sum from the nearest integer, in turns
  bool ambiguous;  // some step had a phase jump of at least pi
};
/// Phase turns of u along the closed node cycle.
WindingResult winding_number(const VectorField& u, std::span<const std::size_t> loop);

struct Piercing {
  Point center;      // plaquette center
  int normal_axis;   // the plaquette spans the two other axes
  int winding;       // orientation relative to +normal_axis
  bool ambiguous;
};
/// Winding on every elementary plaquette; returns those with nonzero winding.
std::vector<Piercing> pierced_plaquettes(const VectorField& u);

struct ExtractionResult {
  std::vector<Curve> curves;
  std::vector<Piercing> raw;  // always filled
  bool ok = true;
  std::string diagnostic;
};
/// Vorticity set of a 3-torus field. When `refine_time` is set, plaquette
/// centers are moved to the minimum of a quadratic fit of |G_t * u|.
ExtractionResult extract_vorticity(const VectorField& u, std::optional<double> refine_time = std::nullopt);

/// Plaquette piercings of a 2-torus field (point vortices).
std::vector<PointVortex> extract_vortices(const VectorField& u);

/// Vorticity density (grad w_1 x grad w_2) / pi of w = G_t * u, one field per
/// component of the curl in 3D (normal axis order 0, 1, 2), or the scalar
/// Jacobian determinant in 2D.
std::vector<ScalarField> jacobian_vorticity(const VectorField& u, double t);

/// Radius of a single closed filament from the area vector
/// A = (1/2) \int wrap(x - c) x mu dx, R = sqrt(|A| / pi).
double area_radius(const VectorField& u, double t);

/// mu-weighted centroid of the vortex near `guess` within a square window.
std::array<double, 2> vortex_centroid(const VectorField& u, double t, const std::array<double, 2>& guess,
                                      double half_width);

/// Shrinking circle radius sqrt(R0^2 - 2 t); throws once extinct.
double circle_reference(double R0, double t);

struct PinningTrajectory {
  std::vector<double> times;
  std::vector<std::array<double, 2>> positions;
};
/// RK4 for X' = -grad a(X) / a(X) with spectral grad a, bilinearly interpolated.
PinningTrajectory pinning_ode(const std::array<double, 2>& X0, const PinningPotential& a, double T, double dt);

/// Curve exchange format: header axis0,axis1[,axis2], one vertex per row.
void write_curve_csv(const Curve& c, const std::filesystem::path& path);
Curve read_curve_csv(const std::filesystem::path& path, std::array<double, 3> period = {1, 1, 1});

}  // namespace codim2
