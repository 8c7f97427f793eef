#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "codim2/errors.hpp"
#include "codim2/geometry.hpp"
#include "segment.hpp"

namespace codim2 {

Curve::Curve(std::vector<Point> vertices, int dim, std::array<double, 3> period, int orientation)
    : vertices_(std::move(vertices)), dim_(dim), period_(period), orientation_(orientation) {
  if (dim != 2 && dim != 3) throw InvalidArgument("curve dimension must be 2 or 3");
  if (orientation != 1 && orientation != -1) throw InvalidArgument("curve orientation must be +1 or -1");
  if (vertices_.size() < 8)
    throw InvalidArgument("curve needs at least 8 vertices, got " + std::to_string(vertices_.size()));
  for (int a = 0; a < dim; ++a)
    if (!(period[a] > 0.0)) throw InvalidArgument("curve period must be positive");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    Point& p = vertices_[i];
    for (int a = 0; a < 3; ++a) {
      if (a >= dim) {
        p[a] = 0.0;
        continue;
      }
      if (!std::isfinite(p[a])) throw InvalidArgument("curve vertex " + std::to_string(i) + " is not finite");
      p[a] -= period[a] * std::floor(p[a] / period[a]);
      if (p[a] >= period[a]) p[a] = 0.0;
    }
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point& p = vertices_[i];
    const Point& q = vertices_[(i + 1) % vertices_.size()];
    for (int a = 0; a < dim; ++a) {
      const double raw = std::abs(q[a] - p[a]);
      if (std::min(raw, period[a] - raw) >= 0.5 * period[a] * (1.0 - 1e-12))
        throw InvalidArgument("curve vertices " + std::to_string(i) + " and " +
                              std::to_string((i + 1) % vertices_.size()) +
                              " are half a period apart on axis " + std::to_string(a));
    }
  }
  if (!(length() > 0.0)) throw InvalidArgument("curve has zero length");
}

Curve Curve::circle(const Point& center, double radius, int normal_axis, int vertices, std::array<double, 3> period,
                    int orientation) {
  if (normal_axis < 0 || normal_axis > 2) throw InvalidArgument("circle normal axis out of range");
  if (!(radius > 0.0)) throw InvalidArgument("circle radius must be positive");
  const int a = (normal_axis + 1) % 3;
  const int b = (normal_axis + 2) % 3;
  std::vector<Point> pts;
  pts.reserve(vertices);
  for (int k = 0; k < vertices; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / vertices;
    Point p = center;
    p[a] += radius * std::cos(angle);
    p[b] += radius * std::sin(angle);
    pts.push_back(p);
  }
  return Curve(std::move(pts), 3, period, orientation);
}

Curve Curve::line(int axis, const Point& through, int vertices, std::array<double, 3> period, int orientation) {
  if (axis < 0 || axis > 2) throw InvalidArgument("line axis out of range");
  std::vector<Point> pts;
  pts.reserve(vertices);
  for (int k = 0; k < vertices; ++k) {
    Point p = through;
    p[axis] += period[axis] * k / vertices;
    pts.push_back(p);
  }
  return Curve(std::move(pts), 3, period, orientation);
}

Point Curve::segment_vector(std::size_t i) const noexcept {
  const Point& p = vertices_[i];
  const Point& q = vertices_[(i + 1) % vertices_.size()];
  Point v{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) v[a] = detail::wrap(q[a] - p[a], period_[a]);
  return v;
}

double Curve::length() const {
  double total = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point v = segment_vector(i);
    total += std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  }
  return total;
}

std::array<int, 3> Curve::lattice_winding() const {
  std::array<double, 3> net{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point v = segment_vector(i);
    for (int a = 0; a < dim_; ++a) net[a] += v[a];
  }
  std::array<int, 3> w{0, 0, 0};
  for (int a = 0; a < dim_; ++a) w[a] = static_cast<int>(std::lround(net[a] / period_[a]));
  return w;
}

double distance_to_curve(const Point& x, const Curve& c) {
  const int dim = c.dim();
  const auto& L = c.period();
  double best = std::numeric_limits<double>::infinity();
  const int images = dim == 3 ? 27 : 9;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point a = c.segment_start(i);
    const Point v = c.segment_vector(i);
    Point w0{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) w0[k] = detail::wrap(x[k] - a[k], L[k]);
    for (int m = 0; m < images; ++m) {
      Point w = w0;
      int code = m;
      for (int k = 0; k < dim; ++k) {
        w[k] += (code % 3 - 1) * L[k];
        code /= 3;
      }
      best = std::min(best, detail::segment_nearest(w, v, dim).distance);
    }
  }
  return best;
}

void write_curve_csv(const Curve& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << (c.dim() == 3 ? "axis0,axis1,axis2\n" : "axis0,axis1\n");
  out << std::setprecision(17);
  for (const Point& p : c.vertices()) {
    out << p[0] << ',' << p[1];
    if (c.dim() == 3) out << ',' << p[2];
    out << '\n';
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

Curve read_curve_csv(const std::filesystem::path& path, std::array<double, 3> period) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty curve file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int dim = 0;
  if (line == "axis0,axis1")
    dim = 2;
  else if (line == "axis0,axis1,axis2")
    dim = 3;
  else
    throw FormatError(path.string() + ": bad header '" + line + "'");
  std::vector<Point> vertices;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    Point p{0.0, 0.0, 0.0};
    std::string cell;
    int k = 0;
    while (std::getline(fields, cell, ',')) {
      if (k >= dim) throw FormatError(path.string() + ": too many columns on row " + std::to_string(row));
      try {
        std::size_t used = 0;
        p[k] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError(path.string() + ": bad number '" + cell + "' on row " + std::to_string(row));
      }
      ++k;
    }
    if (k != dim) throw FormatError(path.string() + ": expected " + std::to_string(dim) + " columns on row " +
                                    std::to_string(row));
    vertices.push_back(p);
  }
  try {
    return Curve(std::move(vertices), dim, period);
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace codim2
