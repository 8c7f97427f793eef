#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "codim2/errors.hpp"
#include "codim2/geometry.hpp"
#include "codim2/spectral.hpp"
#include "segment.hpp"

namespace codim2 {
namespace {

constexpr double kPi = std::numbers::pi;

void require_planar_codomain(const VectorField& u, const char* op) {
  if (u.codomain() != 2) throw InvalidArgument(std::string(op) + ": field must take values in S^1");
}

std::vector<double> angles(const VectorField& u) {
  std::vector<double> a(u.nodes());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::atan2(u.at(k, 1), u.at(k, 0));
  return a;
}

// Principal-branch phase increment from angle a to angle b.
double increment(double a, double b) {
  double d = b - a;
  if (d > kPi) d -= 2.0 * kPi;
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

WindingResult wind(const std::vector<double>& theta, std::span<const std::size_t> loop) {
  double total = 0.0;
  bool ambiguous = false;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const double d = increment(theta[loop[i]], theta[loop[(i + 1) % loop.size()]]);
    if (std::abs(d) >= kPi - 1e-12) ambiguous = true;
    total += d;
  }
  const double turns = total / (2.0 * kPi);
  const double w = std::round(turns);
  return {static_cast<int>(w), std::abs(turns - w), ambiguous};
}

// Axes spanning the plaquette with the given normal, ordered so that the
// loop node, +a, +a+b, +b circulates positively about the normal.
std::pair<int, int> plane_axes(int normal) { return {(normal + 1) % 3, (normal + 2) % 3}; }

struct RawPiercing {
  Piercing p;
  std::size_t node;
};

std::vector<RawPiercing> pierce(const VectorField& u) {
  const TorusGrid& grid = u.grid();
  const auto theta = angles(u);
  std::vector<int> normals;
  if (grid.dim() == 3)
    normals = {0, 1, 2};
  else
    normals = {2};
  std::vector<RawPiercing> out;
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (int c : normals) {
      const auto [a, b] = plane_axes(c);
      const std::size_t ka = grid.shifted(k, a, 1);
      const std::size_t loop[4] = {k, ka, grid.shifted(ka, b, 1), grid.shifted(k, b, 1)};
      const WindingResult w = wind(theta, loop);
      if (w.winding == 0) continue;
      Point center = grid.position(k);
      center[a] += 0.5 * grid.spacing(a);
      center[b] += 0.5 * grid.spacing(b);
      for (int i = 0; i < grid.dim(); ++i)
        if (center[i] >= grid.period(i)) center[i] -= grid.period(i);
      out.push_back({{center, c, w.winding, w.ambiguous}, k});
    }
  return out;
}

double norm(const Point& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }

// Moves each piercing to the minimum of a least-squares quadratic fit of m over
// the 4 x 4 in-plane nodes around its plaquette, clamped to the plaquette.
void refine(std::vector<RawPiercing>& raw, const ScalarField& m) {
  const TorusGrid& grid = m.grid();
  Eigen::Matrix<double, 16, 6> A;
  Eigen::Matrix<double, 16, 1> rhs;
  for (auto& r : raw) {
    const auto [a, b] = plane_axes(r.p.normal_axis);
    int row = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double s = i - 1.5;
        const double t = j - 1.5;
        A.row(row) << 1.0, s, t, s * s, t * t, s * t;
        rhs(row) = m[grid.shifted(grid.shifted(r.node, a, i - 1), b, j - 1)];
        ++row;
      }
    const Eigen::Matrix<double, 6, 1> c = A.colPivHouseholderQr().solve(rhs);
    Eigen::Matrix2d H;
    H << 2.0 * c(3), c(5), c(5), 2.0 * c(4);
    if (!(H.determinant() > 0.0 && H(0, 0) > 0.0)) continue;
    const Eigen::Vector2d x = H.lu().solve(Eigen::Vector2d(-c(1), -c(2)));
    const double s = std::clamp(x(0), -0.5, 0.5);
    const double t = std::clamp(x(1), -0.5, 0.5);
    Point& p = r.p.center;
    p[a] += s * grid.spacing(a);
    p[b] += t * grid.spacing(b);
    p[a] -= grid.period(a) * std::floor(p[a] / grid.period(a));
    p[b] -= grid.period(b) * std::floor(p[b] / grid.period(b));
  }
}

Point direction(const Piercing& p) {
  Point d{0.0, 0.0, 0.0};
  d[p.normal_axis] = p.winding;
  return d;
}

}  // namespace

WindingResult winding_number(const VectorField& u, std::span<const std::size_t> loop) {
  require_planar_codomain(u, "winding_number");
  if (loop.size() < 3) throw InvalidArgument("winding_number: loop needs at least 3 nodes");
  for (std::size_t k : loop)
    if (k >= u.nodes()) throw InvalidArgument("winding_number: loop node out of range");
  std::vector<double> theta(u.nodes());
  for (std::size_t k : loop) theta[k] = std::atan2(u.at(k, 1), u.at(k, 0));
  return wind(theta, loop);
}

std::vector<Piercing> pierced_plaquettes(const VectorField& u) {
  require_planar_codomain(u, "pierced_plaquettes");
  if (u.grid().dim() < 2) throw InvalidArgument("pierced_plaquettes: grid must be 2- or 3-dimensional");
  std::vector<Piercing> out;
  for (auto& r : pierce(u)) out.push_back(r.p);
  return out;
}

ExtractionResult extract_vorticity(const VectorField& u, std::optional<double> refine_time) {
  require_planar_codomain(u, "extract_vorticity");
  const TorusGrid& grid = u.grid();
  if (grid.dim() != 3) throw InvalidArgument("extract_vorticity: grid must be 3-dimensional");
  auto raw = pierce(u);
  std::vector<Point> coarse;
  for (const auto& r : raw) coarse.push_back(r.p.center);
  if (refine_time) {
    const VectorField w = heat_convolve(u, *refine_time);
    ScalarField m(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) m[k] = w.at(k, 0) * w.at(k, 0) + w.at(k, 1) * w.at(k, 1);
    refine(raw, m);
  }

  ExtractionResult result;
  for (const auto& r : raw) result.raw.push_back(r.p);
  if (raw.empty()) return result;

  // Bucket piercings by base node for the neighbor search.
  std::vector<int> head(grid.size(), -1), next(raw.size(), -1);
  for (std::size_t i = raw.size(); i-- > 0;) {
    next[i] = head[raw[i].node];
    head[raw[i].node] = static_cast<int>(i);
  }
  const double reach = 2.0 * grid.max_spacing();
  const auto fail = [&](std::string why) {
    result.ok = false;
    result.curves.clear();
    result.diagnostic = std::move(why);
    return result;
  };

  std::vector<char> used(raw.size(), 0);
  std::vector<std::vector<std::size_t>> loops;
  for (std::size_t start = 0; start < raw.size(); ++start) {
    if (used[start]) continue;
    std::vector<std::size_t> chain{start};
    used[start] = 1;
    std::size_t cur = start;
    bool closed = false;
    while (true) {
      const Point t_cur = direction(raw[cur].p);
      double best_d = std::numeric_limits<double>::infinity();
      std::size_t best = raw.size();
      const Index3 base = grid.coords(raw[cur].node);
      for (int i = -3; i <= 3; ++i)
        for (int j = -3; j <= 3; ++j)
          for (int k = -3; k <= 3; ++k) {
            const std::size_t nb = grid.index({base[0] + i, base[1] + j, base[2] + k});
            for (int c = head[nb]; c >= 0; c = next[c]) {
              const auto cand = static_cast<std::size_t>(c);
              if (cand == cur) continue;
              if (used[cand] && !(cand == start && chain.size() >= 3)) continue;
              const Point d = grid.displacement(coarse[cur], coarse[cand]);
              const double dist = norm(d);
              if (dist > reach) continue;
              const Point t_cand = direction(raw[cand].p);
              const double fwd = d[0] * t_cur[0] + d[1] * t_cur[1] + d[2] * t_cur[2];
              const double into = d[0] * t_cand[0] + d[1] * t_cand[1] + d[2] * t_cand[2];
              if (fwd <= 0.0 || into <= 0.0) continue;
              if (dist < best_d || (dist == best_d && cand < best)) {
                best_d = dist;
                best = cand;
              }
            }
          }
      if (best == raw.size()) break;
      if (best == start) {
        closed = true;
        break;
      }
      used[best] = 1;
      chain.push_back(best);
      cur = best;
    }
    if (!closed) {
      const Point& p = raw[cur].p.center;
      return fail("chaining stopped at plaquette center (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                  ", " + std::to_string(p[2]) + ") with no continuation within 2 cells after " +
                  std::to_string(chain.size()) + " piercings");
    }
    if (chain.size() < 8)
      return fail("closed loop of only " + std::to_string(chain.size()) + " piercings; below the 8 vertex minimum");
    loops.push_back(std::move(chain));
  }

  const std::array<double, 3> period{grid.period(0), grid.period(1), grid.period(2)};
  for (const auto& loop : loops) {
    std::vector<Point> vertices;
    for (std::size_t i : loop) vertices.push_back(raw[i].p.center);
    try {
      result.curves.emplace_back(std::move(vertices), 3, period);
    } catch (const InvalidArgument& e) {
      return fail(std::string("extracted loop is not a valid curve: ") + e.what());
    }
  }
  return result;
}

std::vector<PointVortex> extract_vortices(const VectorField& u) {
  require_planar_codomain(u, "extract_vortices");
  if (u.grid().dim() != 2) throw InvalidArgument("extract_vortices: grid must be 2-dimensional");
  std::vector<PointVortex> out;
  for (const auto& r : pierce(u)) out.push_back({{r.p.center[0], r.p.center[1]}, r.p.winding});
  return out;
}

std::vector<ScalarField> jacobian_vorticity(const VectorField& u, double t) {
  require_planar_codomain(u, "jacobian_vorticity");
  const TorusGrid& grid = u.grid();
  if (grid.dim() < 2) throw InvalidArgument("jacobian_vorticity: grid must be 2- or 3-dimensional");
  const Spectrum s(u);
  std::vector<VectorField> g;
  for (int a = 0; a < grid.dim(); ++a) g.push_back(s.derivative(t, a));
  const auto jac = [&](int a, int b) {
    ScalarField out(grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      out[k] = (g[a].at(k, 0) * g[b].at(k, 1) - g[b].at(k, 0) * g[a].at(k, 1)) / kPi;
    return out;
  };
  if (grid.dim() == 2) return {jac(0, 1)};
  return {jac(1, 2), jac(2, 0), jac(0, 1)};
}

double area_radius(const VectorField& u, double t) {
  const TorusGrid& grid = u.grid();
  if (grid.dim() != 3) throw InvalidArgument("area_radius: grid must be 3-dimensional");
  const auto mu = jacobian_vorticity(u, t);
  std::array<double, 3> sn{0, 0, 0}, cs{0, 0, 0};
  double mass = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = std::sqrt(mu[0][k] * mu[0][k] + mu[1][k] * mu[1][k] + mu[2][k] * mu[2][k]);
    const Point x = grid.position(k);
    for (int a = 0; a < 3; ++a) {
      const double ang = 2.0 * kPi * x[a] / grid.period(a);
      sn[a] += w * std::sin(ang);
      cs[a] += w * std::cos(ang);
    }
    mass += w;
  }
  if (!(mass > 0.0)) return 0.0;
  Point center{0, 0, 0};
  for (int a = 0; a < 3; ++a) center[a] = grid.period(a) * std::atan2(sn[a], cs[a]) / (2.0 * kPi);
  Point A{0, 0, 0};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point r = grid.displacement(center, grid.position(k));
    A[0] += r[1] * mu[2][k] - r[2] * mu[1][k];
    A[1] += r[2] * mu[0][k] - r[0] * mu[2][k];
    A[2] += r[0] * mu[1][k] - r[1] * mu[0][k];
  }
  const double scale = 0.5 * grid.cell_volume();
  return std::sqrt(scale * norm(A) / kPi);
}

std::array<double, 2> vortex_centroid(const VectorField& u, double t, const std::array<double, 2>& guess,
                                      double half_width) {
  const TorusGrid& grid = u.grid();
  if (grid.dim() != 2) throw InvalidArgument("vortex_centroid: grid must be 2-dimensional");
  if (!(half_width > 0.0)) throw InvalidArgument("vortex_centroid: half_width must be positive");
  const ScalarField mu = jacobian_vorticity(u, t)[0];
  const Point g{guess[0], guess[1], 0.0};
  double m = 0.0, x0 = 0.0, x1 = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point r = grid.displacement(g, grid.position(k));
    if (std::abs(r[0]) > half_width || std::abs(r[1]) > half_width) continue;
    m += mu[k];
    x0 += r[0] * mu[k];
    x1 += r[1] * mu[k];
  }
  if (m == 0.0) throw InvalidArgument("vortex_centroid: no vorticity inside the window");
  std::array<double, 2> c{guess[0] + x0 / m, guess[1] + x1 / m};
  for (int a = 0; a < 2; ++a) c[a] -= grid.period(a) * std::floor(c[a] / grid.period(a));
  return c;
}

}  // namespace codim2
