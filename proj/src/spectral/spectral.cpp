#include "codim2/spectral.hpp"

#include <cmath>
#include <cstring>
#include <deque>
#include <mutex>
#include <numbers>
#include <string>

#include "codim2/errors.hpp"
#include "codim2/parallel.hpp"
#include "codim2/simd.hpp"
#include "fft.hpp"

namespace codim2 {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive_time(double t, const char* op) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw InvalidArgument(std::string(op) + ": diffusion time must be positive, got " +
                          std::to_string(t));
}

void require_nonnegative_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw InvalidArgument("diffusion time must be non-negative, got " + std::to_string(t));
}

// Per-mode multiplier including the 1/N inverse-transform normalization.
std::vector<double> normalized(const GaussianMultiplier& g) {
  const double inv_n = 1.0 / static_cast<double>(g.grid().size());
  std::vector<double> w(g.weights().begin(), g.weights().end());
  for (double& x : w) x *= inv_n;
  return w;
}

double angular_frequency(const TorusGrid& grid, int axis, int k) {
  return kTwoPi * k / grid.period(axis);
}

}  // namespace

HalfSpectrum::HalfSpectrum(const TorusGrid& grid) : grid_(grid), extent_{1, 1, 1}, size_(1) {
  const int last = grid.dim() - 1;
  for (int a = 0; a < grid.dim(); ++a) {
    extent_[a] = a == last ? grid.resolution(a) / 2 + 1 : grid.resolution(a);
    size_ *= extent_[a];
  }
}

Index3 HalfSpectrum::mode(std::size_t index) const noexcept {
  Index3 k{0, 0, 0};
  for (int a = 2; a >= 0; --a) {
    const int j = static_cast<int>(index % extent_[a]);
    index /= extent_[a];
    const int n = grid_.resolution(a);
    k[a] = j <= n / 2 ? j : j - n;
  }
  return k;
}

int HalfSpectrum::multiplicity(std::size_t index) const noexcept {
  const int last = grid_.dim() - 1;
  const int j = mode(index)[last];
  return (j == 0 || j == grid_.resolution(last) / 2) ? 1 : 2;
}

bool HalfSpectrum::nyquist(std::size_t index, int axis) const noexcept {
  return mode(index)[axis] == grid_.resolution(axis) / 2;
}

double HalfSpectrum::squared_frequency(std::size_t index) const noexcept {
  const Index3 k = mode(index);
  double q = 0.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    const double f = k[a] / grid_.period(a);
    q += f * f;
  }
  return q;
}

GaussianMultiplier::GaussianMultiplier(const TorusGrid& grid, double t) : grid_(grid), t_(t) {
  require_nonnegative_time(t);
  const HalfSpectrum spec(grid);
  weights_.resize(spec.size());
  const double c = 4.0 * std::numbers::pi * std::numbers::pi * t;
  for (std::size_t i = 0; i < spec.size(); ++i) weights_[i] = std::exp(-c * spec.squared_frequency(i));
}

double GaussianMultiplier::weight(const TorusGrid& grid, double t, const Index3& k) {
  double q = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const double f = k[a] / grid.period(a);
    q += f * f;
  }
  return std::exp(-4.0 * std::numbers::pi * std::numbers::pi * t * q);
}

std::shared_ptr<const GaussianMultiplier> gaussian_multiplier(const TorusGrid& grid, double t) {
  static std::mutex mutex;
  static std::deque<std::shared_ptr<const GaussianMultiplier>> recent;
  {
    std::lock_guard lock(mutex);
    for (const auto& g : recent)
      if (g->t() == t && g->grid() == grid) return g;
  }
  auto g = std::make_shared<const GaussianMultiplier>(grid, t);
  std::lock_guard lock(mutex);
  recent.push_front(g);
  if (recent.size() > 16) recent.pop_back();
  return g;
}

Spectrum::Spectrum(const VectorField& u) : grid_(u.grid()), components_(u.codomain()) {
  const auto& plan = detail::fft_plan(grid_);
  data_.assign(components_, nullptr);
  for (auto& p : data_)
    p = reinterpret_cast<std::complex<double>*>(detail::alloc_complex(plan.complex_size));
  parallel_for(components_, [&](std::size_t c) { transform(u.component(static_cast<int>(c)), static_cast<int>(c)); });
}

Spectrum::Spectrum(const ScalarField& f) : grid_(f.grid()), components_(1) {
  const auto& plan = detail::fft_plan(grid_);
  data_.assign(1, reinterpret_cast<std::complex<double>*>(detail::alloc_complex(plan.complex_size)));
  transform(f.values(), 0);
}

Spectrum::~Spectrum() {
  for (auto* p : data_) detail::release(p);
}

Spectrum::Spectrum(Spectrum&& o) noexcept
    : grid_(o.grid_), components_(o.components_), data_(std::move(o.data_)) {
  o.data_.clear();
}

Spectrum& Spectrum::operator=(Spectrum&& o) noexcept {
  if (this != &o) {
    for (auto* p : data_) detail::release(p);
    grid_ = o.grid_;
    components_ = o.components_;
    data_ = std::move(o.data_);
    o.data_.clear();
  }
  return *this;
}

void Spectrum::transform(std::span<const double> values, int c) {
  const auto& plan = detail::fft_plan(grid_);
  double* in = detail::alloc_real(plan.real_size);
  std::memcpy(in, values.data(), sizeof(double) * plan.real_size);
  fftw_execute_dft_r2c(plan.forward, in, reinterpret_cast<fftw_complex*>(data_[c]));
  detail::release(in);
}

std::span<const std::complex<double>> Spectrum::coefficients(int c) const noexcept {
  return {data_[c], detail::fft_plan(grid_).complex_size};
}

void Spectrum::synthesize(int c, const std::function<void(std::complex<double>*)>& apply,
                          std::span<double> out) const {
  const auto& plan = detail::fft_plan(grid_);
  fftw_complex* work = detail::alloc_complex(plan.complex_size);
  double* real = detail::alloc_real(plan.real_size);
  std::memcpy(work, data_[c], sizeof(fftw_complex) * plan.complex_size);
  apply(reinterpret_cast<std::complex<double>*>(work));
  fftw_execute_dft_c2r(plan.backward, work, real);
  std::memcpy(out.data(), real, sizeof(double) * plan.real_size);
  detail::release(work);
  detail::release(real);
}

VectorField Spectrum::filtered(double t) const {
  require_nonnegative_time(t);
  const auto w = normalized(*gaussian_multiplier(grid_, t));
  const auto& k = simd::active();
  if (components_ < 2) throw InvalidArgument("filtered: spectrum holds a scalar field");
  VectorField out(grid_, components_);
  parallel_for(components_, [&](std::size_t c) {
    synthesize(static_cast<int>(c),
               [&](std::complex<double>* z) { k.scale_complex(reinterpret_cast<double*>(z), w.data(), w.size()); },
               out.component(static_cast<int>(c)));
  });
  return out;
}

ScalarField Spectrum::filtered_scalar(double t, int c) const {
  require_nonnegative_time(t);
  const auto w = normalized(*gaussian_multiplier(grid_, t));
  const auto& k = simd::active();
  ScalarField out(grid_);
  synthesize(c, [&](std::complex<double>* z) { k.scale_complex(reinterpret_cast<double*>(z), w.data(), w.size()); },
             out.values());
  return out;
}

namespace {

std::vector<double> derivative_weights(const TorusGrid& grid, double t, int axis) {
  if (axis < 0 || axis >= grid.dim()) throw InvalidArgument("derivative axis out of range");
  const HalfSpectrum spec(grid);
  auto w = normalized(*gaussian_multiplier(grid, t));
  for (std::size_t i = 0; i < w.size(); ++i) {
    const int ka = spec.mode(i)[axis];
    w[i] = ka == grid.resolution(axis) / 2 ? 0.0 : w[i] * angular_frequency(grid, axis, ka);
  }
  return w;
}

}  // namespace

VectorField Spectrum::derivative(double t, int axis) const {
  require_nonnegative_time(t);
  if (components_ < 2) throw InvalidArgument("derivative: spectrum holds a scalar field");
  const auto w = derivative_weights(grid_, t, axis);
  const auto& k = simd::active();
  VectorField out(grid_, components_);
  parallel_for(components_, [&](std::size_t c) {
    synthesize(static_cast<int>(c),
               [&](std::complex<double>* z) { k.scale_complex_imag(reinterpret_cast<double*>(z), w.data(), w.size()); },
               out.component(static_cast<int>(c)));
  });
  return out;
}

ScalarField Spectrum::derivative_scalar(double t, int axis, int c) const {
  require_nonnegative_time(t);
  const auto w = derivative_weights(grid_, t, axis);
  const auto& k = simd::active();
  ScalarField out(grid_);
  synthesize(c, [&](std::complex<double>* z) { k.scale_complex_imag(reinterpret_cast<double*>(z), w.data(), w.size()); },
             out.values());
  return out;
}

ScalarField Spectrum::second_derivative_scalar(double t, int a, int b, int c) const {
  require_nonnegative_time(t);
  if (a < 0 || a >= grid_.dim() || b < 0 || b >= grid_.dim())
    throw InvalidArgument("derivative axis out of range");
  const HalfSpectrum spec(grid_);
  auto w = normalized(*gaussian_multiplier(grid_, t));
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Index3 m = spec.mode(i);
    if (m[a] == grid_.resolution(a) / 2 || m[b] == grid_.resolution(b) / 2) {
      w[i] = 0.0;
      continue;
    }
    w[i] = -(w[i] * angular_frequency(grid_, a, m[a]) * angular_frequency(grid_, b, m[b]));
  }
  const auto& k = simd::active();
  ScalarField out(grid_);
  synthesize(c, [&](std::complex<double>* z) { k.scale_complex(reinterpret_cast<double*>(z), w.data(), w.size()); },
             out.values());
  return out;
}

double Spectrum::power(const std::function<double(double)>& f) const {
  const HalfSpectrum spec(grid_);
  std::vector<double> terms(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < components_; ++c) s += std::norm(data_[c][i]);
    terms[i] = spec.multiplicity(i) * f(spec.squared_frequency(i)) * s;
  }
  const double n = static_cast<double>(grid_.size());
  return simd::sum(terms) * (grid_.volume() / (n * n));
}

VectorField heat_convolve(const VectorField& u, double t) {
  require_positive_time(t, "heat_convolve");
  return Spectrum(u).filtered(t);
}

ScalarField heat_convolve(const ScalarField& f, double t) {
  require_positive_time(t, "heat_convolve");
  return Spectrum(f).filtered_scalar(t);
}

std::vector<VectorField> grad_heat_convolve(const VectorField& u, double t) {
  require_positive_time(t, "grad_heat_convolve");
  const Spectrum s(u);
  std::vector<VectorField> g;
  for (int a = 0; a < u.grid().dim(); ++a) g.push_back(s.derivative(t, a));
  return g;
}

std::vector<ScalarField> grad_heat_convolve(const ScalarField& f, double t) {
  require_positive_time(t, "grad_heat_convolve");
  const Spectrum s(f);
  std::vector<ScalarField> g;
  for (int a = 0; a < f.grid().dim(); ++a) g.push_back(s.derivative_scalar(t, a));
  return g;
}

VectorField commutator(const ScalarField& psi, const VectorField& u, double t) {
  require_positive_time(t, "commutator");
  if (!(psi.grid() == u.grid())) throw InvalidArgument("commutator: grid mismatch");
  return heat_convolve(multiply(psi, u), t) - multiply(psi, heat_convolve(u, t));
}

}  // namespace codim2
