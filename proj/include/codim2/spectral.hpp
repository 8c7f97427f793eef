#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "codim2/grid.hpp"

namespace codim2 {

/// Layout of the real-to-complex half spectrum of a grid: all active axes at
/// full length except the last, which keeps modes 0..n/2. Modes are signed,
/// k in [-n/2, n/2) on full axes; the Nyquist index n/2 is reported as +n/2.
class HalfSpectrum {
 public:
  explicit HalfSpectrum(const TorusGrid& grid);

  std::size_t size() const noexcept { return size_; }
  Index3 mode(std::size_t index) const noexcept;
  /// 2 for modes whose conjugate partner is not stored, 1 otherwise.
  int multiplicity(std::size_t index) const noexcept;
  /// True when any axis of the mode sits at the Nyquist index.
  bool nyquist(std::size_t index, int axis) const noexcept;
  /// |k/period|^2.
  double squared_frequency(std::size_t index) const noexcept;

  const TorusGrid& grid() const noexcept { return grid_; }

 private:
  TorusGrid grid_;
  Index3 extent_;
  std::size_t size_;
};

/// Per-mode weights exp(-4 pi^2 t |k/period|^2) of the heat semigroup G_t.
class GaussianMultiplier {
 public:
  GaussianMultiplier(const TorusGrid& grid, double t);

  double t() const noexcept { return t_; }
  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Weight of a signed integer mode (need not be on the discrete spectrum).
  static double weight(const TorusGrid& grid, double t, const Index3& k);

 private:
  TorusGrid grid_;
  double t_;
  std::vector<double> weights_;
};

/// Cached multiplier, shared between calls with the same grid and time.
std::shared_ptr<const GaussianMultiplier> gaussian_multiplier(const TorusGrid& grid, double t);

/// Forward transforms of a field's components. Filtered values and
/// derivatives at any diffusion time can be drawn from one transform.
class Spectrum {
 public:
  explicit Spectrum(const VectorField& u);
  explicit Spectrum(const ScalarField& f);
  ~Spectrum();
  Spectrum(Spectrum&&) noexcept;
  Spectrum& operator=(Spectrum&&) noexcept;

  const TorusGrid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::span<const std::complex<double>> coefficients(int c) const noexcept;

  /// G_t * u; t = 0 returns the round-tripped input.
  VectorField filtered(double t) const;
  ScalarField filtered_scalar(double t, int c = 0) const;
  /// d/dx_axis (G_t * u); the Nyquist mode of that axis is dropped.
  VectorField derivative(double t, int axis) const;
  ScalarField derivative_scalar(double t, int axis, int c = 0) const;
  /// d^2/(dx_a dx_b) (G_t * f).
  ScalarField second_derivative_scalar(double t, int a, int b, int c = 0) const;

  /// \int sum_c |F_c(x)|^2 dx where F_c has Fourier weights f(|k/period|^2).
  double power(const std::function<double(double)>& f) const;

 private:
  void transform(std::span<const double> values, int c);
  void synthesize(int c, const std::function<void(std::complex<double>*)>& apply,
                  std::span<double> out) const;

  TorusGrid grid_;
  int components_;
  std::vector<std::complex<double>*> data_;
};

/// G_t * u, componentwise.
VectorField heat_convolve(const VectorField& u, double t);
ScalarField heat_convolve(const ScalarField& f, double t);

/// d fields, the axis-i entry being d_i (G_t * u).
std::vector<VectorField> grad_heat_convolve(const VectorField& u, double t);
std::vector<ScalarField> grad_heat_convolve(const ScalarField& f, double t);

/// G_t * (psi u) - psi (G_t * u).
VectorField commutator(const ScalarField& psi, const VectorField& u, double t);

}  // namespace codim2
