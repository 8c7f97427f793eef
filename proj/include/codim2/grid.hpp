#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace codim2 {

using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Uniform periodic grid on [0, period_0) x ... x [0, period_{d-1}).
///
/// Nodes are cell centered, x_j = (j + 1/2) * spacing, and stored in C order
/// (axis 0 slowest). Axes beyond `dim()` have resolution 1 so that index
/// arithmetic is uniform across dimensions.
class TorusGrid {
 public:
  TorusGrid(int dim, std::array<double, 3> period, Index3 resolution);

  static TorusGrid cube(int dim, int n, double period = 1.0);

  int dim() const noexcept { return dim_; }
  double period(int axis) const noexcept { return period_[axis]; }
  int resolution(int axis) const noexcept { return resolution_[axis]; }
  double spacing(int axis) const noexcept { return period_[axis] / resolution_[axis]; }
  double max_spacing() const noexcept;
  std::size_t size() const noexcept { return size_; }
  double volume() const noexcept;
  double cell_volume() const noexcept { return volume() / static_cast<double>(size_); }

  Index3 coords(std::size_t index) const noexcept;
  std::size_t index(Index3 c) const noexcept;  // wraps periodically
  std::size_t shifted(std::size_t index, int axis, int offset) const noexcept;
  Point position(std::size_t index) const noexcept;

  /// Shortest periodic displacement b - a, componentwise in [-L/2, L/2).
  Point displacement(const Point& a, const Point& b) const noexcept;

  bool operator==(const TorusGrid& other) const noexcept;

 private:
  int dim_;
  std::array<double, 3> period_;
  Index3 resolution_;
  std::size_t size_;
};

class ScalarField {
 public:
  explicit ScalarField(TorusGrid grid, double fill = 0.0);
  ScalarField(TorusGrid grid, std::vector<double> values);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double min() const;
  double max() const;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// Dense field of `codomain`-vectors, stored component-planar.
class VectorField {
 public:
  VectorField(TorusGrid grid, int codomain);
  VectorField(TorusGrid grid, int codomain, std::vector<double> planar);

  /// Constant field equal to `value` at every node.
  static VectorField constant(TorusGrid grid, std::span<const double> value);

  const TorusGrid& grid() const noexcept { return grid_; }
  int codomain() const noexcept { return codomain_; }
  std::size_t nodes() const noexcept { return grid_.size(); }

  std::span<double> component(int c) noexcept;
  std::span<const double> component(int c) const noexcept;
  double at(std::size_t node, int c) const noexcept { return data_[c * nodes() + node]; }
  double& at(std::size_t node, int c) noexcept { return data_[c * nodes() + node]; }
  std::span<const double> planar() const noexcept { return data_; }
  std::span<double> planar() noexcept { return data_; }

  double max_unit_deviation() const;
  bool is_unit(double tolerance = 1e-12) const { return max_unit_deviation() <= tolerance; }

  bool same_shape(const VectorField& other) const noexcept {
    return codomain_ == other.codomain_ && grid_ == other.grid_;
  }

 private:
  TorusGrid grid_;
  int codomain_;
  std::vector<double> data_;
};

using VectorFunction = std::function<void(const Point&, std::span<double>)>;

/// Evaluates f at every node. Throws InvalidArgument naming the first node
/// where f is not finite.
VectorField sample(const TorusGrid& grid, int codomain, const VectorFunction& f);
ScalarField sample_scalar(const TorusGrid& grid, const std::function<double(const Point&)>& f);

/// Riemann mean times volume; exact for trigonometric polynomials below Nyquist.
double integrate(const ScalarField& f);
double integrate(const TorusGrid& grid, std::span<const double> values);

/// \int u . w dx with the same quadrature and a fixed summation order.
double dot_integral(const VectorField& u, const VectorField& w);

/// \int psi u . w dx.
double weighted_dot_integral(const ScalarField& psi, const VectorField& u, const VectorField& w);

// Elementwise helpers used throughout the step and diagnostic code.
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);
VectorField multiply(const ScalarField& psi, const VectorField& u);
ScalarField nodewise_dot(const VectorField& u, const VectorField& w);
ScalarField operator*(const ScalarField& a, const ScalarField& b);

double max_abs_difference(const VectorField& a, const VectorField& b);

}  // namespace codim2
