#include "codim2/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "codim2/errors.hpp"
#include "codim2/simd.hpp"

namespace codim2 {

TorusGrid::TorusGrid(int dim, std::array<double, 3> period, Index3 resolution)
    : dim_(dim), period_(period), resolution_(resolution), size_(1) {
  if (dim < 1 || dim > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      resolution_[a] = 1;
      period_[a] = 1.0;
      continue;
    }
    if (resolution[a] < 8 || resolution[a] % 2 != 0)
      throw InvalidArgument("resolution on axis " + std::to_string(a) +
                            " must be even and >= 8, got " + std::to_string(resolution[a]));
    if (!(period[a] > 0.0) || !std::isfinite(period[a]))
      throw InvalidArgument("period on axis " + std::to_string(a) + " must be positive");
    size_ *= static_cast<std::size_t>(resolution[a]);
  }
}

TorusGrid TorusGrid::cube(int dim, int n, double period) {
  return TorusGrid(dim, {period, period, period}, {n, n, n});
}

double TorusGrid::max_spacing() const noexcept {
  double m = 0.0;
  for (int a = 0; a < dim_; ++a) m = std::max(m, spacing(a));
  return m;
}

double TorusGrid::volume() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= period_[a];
  return v;
}

Index3 TorusGrid::coords(std::size_t index) const noexcept {
  Index3 c{0, 0, 0};
  for (int a = 2; a >= 0; --a) {
    c[a] = static_cast<int>(index % resolution_[a]);
    index /= resolution_[a];
  }
  return c;
}

std::size_t TorusGrid::index(Index3 c) const noexcept {
  std::size_t idx = 0;
  for (int a = 0; a < 3; ++a) {
    const int n = resolution_[a];
    int k = c[a] % n;
    if (k < 0) k += n;
    idx = idx * n + k;
  }
  return idx;
}

std::size_t TorusGrid::shifted(std::size_t index, int axis, int offset) const noexcept {
  Index3 c = coords(index);
  c[axis] += offset;
  return this->index(c);
}

Point TorusGrid::position(std::size_t index) const noexcept {
  const Index3 c = coords(index);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = (c[a] + 0.5) * spacing(a);
  return x;
}

Point TorusGrid::displacement(const Point& a, const Point& b) const noexcept {
  Point d{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k) {
    const double L = period_[k];
    double s = b[k] - a[k];
    s -= L * std::floor(s / L + 0.5);
    if (s >= 0.5 * L) s -= L;
    d[k] = s;
  }
  return d;
}

bool TorusGrid::operator==(const TorusGrid& other) const noexcept {
  return dim_ == other.dim_ && resolution_ == other.resolution_ && period_ == other.period_;
}

ScalarField::ScalarField(TorusGrid grid, double fill)
    : grid_(std::move(grid)), values_(grid_.size(), fill) {}

ScalarField::ScalarField(TorusGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("scalar field has " + std::to_string(values_.size()) +
                          " values, grid has " + std::to_string(grid_.size()) + " nodes");
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

VectorField::VectorField(TorusGrid grid, int codomain)
    : grid_(std::move(grid)), codomain_(codomain) {
  if (codomain < 2) throw InvalidArgument("codomain must be >= 2");
  data_.assign(grid_.size() * codomain, 0.0);
}

VectorField::VectorField(TorusGrid grid, int codomain, std::vector<double> planar)
    : grid_(std::move(grid)), codomain_(codomain), data_(std::move(planar)) {
  if (codomain < 2) throw InvalidArgument("codomain must be >= 2");
  if (data_.size() != grid_.size() * codomain)
    throw InvalidArgument("vector field payload has " + std::to_string(data_.size()) +
                          " values, expected " + std::to_string(grid_.size() * codomain));
}

VectorField VectorField::constant(TorusGrid grid, std::span<const double> value) {
  VectorField u(std::move(grid), static_cast<int>(value.size()));
  for (int c = 0; c < u.codomain(); ++c) std::fill_n(u.component(c).begin(), u.nodes(), value[c]);
  return u;
}

std::span<double> VectorField::component(int c) noexcept {
  return {data_.data() + c * nodes(), nodes()};
}

std::span<const double> VectorField::component(int c) const noexcept {
  return {data_.data() + c * nodes(), nodes()};
}

double VectorField::max_unit_deviation() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < nodes(); ++k) {
    double s = 0.0;
    for (int c = 0; c < codomain_; ++c) s += at(k, c) * at(k, c);
    worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
  }
  return worst;
}

namespace {

void require_same(const VectorField& a, const VectorField& b, const char* op) {
  if (!a.same_shape(b))
    throw InvalidArgument(std::string(op) + ": grid or codomain mismatch (" +
                          std::to_string(a.codomain()) + " vs " + std::to_string(b.codomain()) +
                          " components)");
}

void require_grid(const TorusGrid& a, const TorusGrid& b, const char* op) {
  if (!(a == b)) throw InvalidArgument(std::string(op) + ": grid mismatch");
}

}  // namespace

VectorField sample(const TorusGrid& grid, int codomain, const VectorFunction& f) {
  VectorField u(grid, codomain);
  std::vector<double> buf(codomain);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    f(grid.position(k), buf);
    for (int c = 0; c < codomain; ++c) {
      if (!std::isfinite(buf[c]))
        throw InvalidArgument("sample: non-finite value at node " + std::to_string(k) +
                              ", component " + std::to_string(c));
      u.at(k, c) = buf[c];
    }
  }
  return u;
}

ScalarField sample_scalar(const TorusGrid& grid, const std::function<double(const Point&)>& f) {
  ScalarField s(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    s[k] = f(grid.position(k));
    if (!std::isfinite(s[k]))
      throw InvalidArgument("sample: non-finite value at node " + std::to_string(k));
  }
  return s;
}

double integrate(const TorusGrid& grid, std::span<const double> values) {
  return simd::sum(values) * grid.cell_volume();
}

double integrate(const ScalarField& f) { return integrate(f.grid(), f.values()); }

double dot_integral(const VectorField& u, const VectorField& w) {
  require_same(u, w, "dot_integral");
  double s = 0.0;
  for (int c = 0; c < u.codomain(); ++c) s += simd::dot(u.component(c), w.component(c));
  return s * u.grid().cell_volume();
}

double weighted_dot_integral(const ScalarField& psi, const VectorField& u, const VectorField& w) {
  require_same(u, w, "weighted_dot_integral");
  require_grid(psi.grid(), u.grid(), "weighted_dot_integral");
  double s = 0.0;
  for (int c = 0; c < u.codomain(); ++c)
    s += simd::dot3(u.component(c), w.component(c), psi.values());
  return s * u.grid().cell_volume();
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same(a, b, "operator-");
  VectorField r = a;
  auto rp = r.planar();
  auto bp = b.planar();
  for (std::size_t i = 0; i < rp.size(); ++i) rp[i] -= bp[i];
  return r;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same(a, b, "operator+");
  VectorField r = a;
  auto rp = r.planar();
  auto bp = b.planar();
  for (std::size_t i = 0; i < rp.size(); ++i) rp[i] += bp[i];
  return r;
}

VectorField operator*(double s, const VectorField& a) {
  VectorField r = a;
  for (double& x : r.planar()) x *= s;
  return r;
}

VectorField multiply(const ScalarField& psi, const VectorField& u) {
  require_grid(psi.grid(), u.grid(), "multiply");
  VectorField r = u;
  for (int c = 0; c < u.codomain(); ++c) {
    auto rc = r.component(c);
    for (std::size_t k = 0; k < rc.size(); ++k) rc[k] *= psi[k];
  }
  return r;
}

ScalarField nodewise_dot(const VectorField& u, const VectorField& w) {
  require_same(u, w, "nodewise_dot");
  ScalarField r(u.grid());
  for (int c = 0; c < u.codomain(); ++c) {
    auto uc = u.component(c);
    auto wc = w.component(c);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += uc[k] * wc[k];
  }
  return r;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_grid(a.grid(), b.grid(), "operator*");
  ScalarField r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] *= b[k];
  return r;
}

double max_abs_difference(const VectorField& a, const VectorField& b) {
  require_same(a, b, "max_abs_difference");
  double m = 0.0;
  auto ap = a.planar();
  auto bp = b.planar();
  for (std::size_t i = 0; i < ap.size(); ++i) m = std::max(m, std::abs(ap[i] - bp[i]));
  return m;
}

}  // namespace codim2
