#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "codim2/errors.hpp"
#include "codim2/harness.hpp"
#include "internal.hpp"

namespace codim2 {
namespace {

using nlohmann::json;

constexpr const char* kVariantNames[] = {"periodic", "neumann", "dirichlet", "pinning", "hmhf"};
constexpr const char* kInitialKinds[] = {"straight_pair", "circle",        "dipole",          "file",
                                         "constant",      "plane_wave",    "random_smooth", "random_geodesic",
                                         "analytic_line"};

Variant parse_variant(const std::string& s) {
  for (int i = 0; i < 5; ++i)
    if (s == kVariantNames[i]) return static_cast<Variant>(i);
  throw InvalidArgument("variant: unknown value '" + s + "'");
}

json point_json(const Point& p) { return json::array({p[0], p[1], p[2]}); }

template <std::size_t N>
std::array<double, N> read_array(const json& j, const std::string& key, std::array<double, N> fallback) {
  if (!j.is_array() || j.empty() || j.size() > N)
    throw InvalidArgument(key + ": expected an array of 1.." + std::to_string(N) + " numbers");
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument(key + ": entries must be numbers");
    fallback[i] = j[i].get<double>();
  }
  return fallback;
}

json defaults_json() { return json::parse(SimulationConfig{}.to_json()); }

bool compatible(const json& def, const json& v) {
  if (def.is_number_integer() || def.is_number_unsigned()) return v.is_number_integer() || v.is_number_unsigned();
  if (def.is_number()) return v.is_number();
  if (def.is_array()) return v.is_array();
  return def.type() == v.type();
}

// Copies `src` onto `dst`, rejecting keys absent from the defaults schema.
void merge(json& dst, const json& src, const json& schema, const std::string& prefix) {
  if (!src.is_object()) throw InvalidArgument((prefix.empty() ? "config" : prefix) + ": expected an object");
  for (auto it = src.begin(); it != src.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!schema.contains(it.key())) throw InvalidArgument("unknown config key '" + key + "'");
    const json& def = schema[it.key()];
    if (def.is_object()) {
      merge(dst[it.key()], it.value(), def, key);
    } else {
      if (!compatible(def, it.value())) throw InvalidArgument("config key '" + key + "' has the wrong type");
      dst[it.key()] = it.value();
    }
  }
}

void apply_override(json& doc, const json& schema, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidArgument("override '" + text + "' is not key=value");
  const std::string path = text.substr(0, eq);
  const std::string raw = text.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json nested = value;
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) nested = json{{*it, nested}};
  merge(doc, nested, schema, "");
}

SimulationConfig from_json(const json& j) {
  SimulationConfig c;
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.dim = j.at("dim").get<int>();
  if (c.dim < 1 || c.dim > 3) throw InvalidArgument("dim must be 1, 2 or 3");
  const json& res = j.at("resolution");
  const json& per = j.at("period");
  if (res.size() != static_cast<std::size_t>(c.dim) || per.size() != static_cast<std::size_t>(c.dim))
    throw InvalidArgument("resolution and period need exactly dim entries");
  c.resolution = {1, 1, 1};
  c.period = {1.0, 1.0, 1.0};
  for (int a = 0; a < c.dim; ++a) {
    if (!res[a].is_number_integer()) throw InvalidArgument("resolution entries must be integers");
    if (!per[a].is_number()) throw InvalidArgument("period entries must be numbers");
    c.resolution[a] = res[a].get<int>();
    c.period[a] = per[a].get<double>();
  }
  c.h = j.at("h").get<double>();
  c.steps = j.at("steps").get<int>();
  c.sigma = j.at("sigma").get<double>();
  c.codomain = j.at("codomain").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.output = j.at("output").get<std::string>();

  const json& in = j.at("initial");
  auto& i = c.initial;
  i.kind = in.at("kind").get<std::string>();
  i.R0 = in.at("R0").get<double>();
  i.center = read_array<3>(in.at("center"), "initial.center", i.center);
  i.normal_axis = in.at("normal_axis").get<int>();
  i.axis = in.at("axis").get<int>();
  i.a = read_array<2>(in.at("a"), "initial.a", i.a);
  i.b = read_array<2>(in.at("b"), "initial.b", i.b);
  i.p = read_array<2>(in.at("p"), "initial.p", i.p);
  i.q = read_array<2>(in.at("q"), "initial.q", i.q);
  i.point = read_array<2>(in.at("point"), "initial.point", i.point);
  i.sign = in.at("sign").get<int>();
  i.kmax = in.at("kmax").get<int>();
  i.angle = in.at("angle").get<double>();
  i.value.clear();
  for (const auto& v : in.at("value")) {
    if (!v.is_number()) throw InvalidArgument("initial.value entries must be numbers");
    i.value.push_back(v.get<double>());
  }
  i.path = in.at("path").get<std::string>();

  const json& pot = j.at("potential");
  c.potential.amplitude = pot.at("amplitude").get<double>();
  c.potential.axis = pot.at("axis").get<int>();
  c.potential.invert = pot.at("invert").get<bool>();

  c.mask.lo = read_array<3>(j.at("mask").at("lo"), "mask.lo", c.mask.lo);
  c.mask.hi = read_array<3>(j.at("mask").at("hi"), "mask.hi", c.mask.hi);

  const json& d = j.at("diagnostics");
  auto& g = c.diagnostics;
  g.ledger = d.at("ledger").get<bool>();
  g.gronwall = d.at("gronwall").get<bool>();
  g.el_residuals = d.at("el_residuals").get<bool>();
  g.extraction_every = d.at("extraction_every").get<int>();
  g.snapshot_every = d.at("snapshot_every").get<int>();
  g.zeta_center = read_array<3>(d.at("zeta_center"), "diagnostics.zeta_center", g.zeta_center);
  g.zeta_radius = d.at("zeta_radius").get<double>();
  return c;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

bool known_kind(const std::string& k) {
  for (const char* s : kInitialKinds)
    if (k == s) return true;
  return false;
}

// Circle at the shrinking-circle radius of time t, or the static line pair.
std::vector<Curve> seed_curves(const SimulationConfig& cfg, double t) {
  const InitialSpec& in = cfg.initial;
  if (in.kind == "circle")
    return {Curve::circle(in.center, circle_reference(in.R0, t), in.normal_axis, 512, cfg.period)};
  const int ax = in.axis, a1 = (ax + 1) % 3, a2 = (ax + 2) % 3;
  Point pa{}, pb{};
  pa[a1] = in.a[0];
  pa[a2] = in.a[1];
  pb[a1] = in.b[0];
  pb[a2] = in.b[1];
  const int n = std::max(16, cfg.resolution[ax] / 2);
  return {Curve::line(ax, pa, n, cfg.period, 1), Curve::line(ax, pb, n, cfg.period, -1)};
}

}  // namespace

std::string_view variant_name(Variant v) { return kVariantNames[static_cast<int>(v)]; }

TorusGrid SimulationConfig::grid() const { return TorusGrid(dim, period, resolution); }

void SimulationConfig::validate() const {
  const TorusGrid g = grid();
  require(h > 0.0 && std::isfinite(h), "h must be positive");
  require(steps >= 1, "steps must be at least 1");
  require(sigma > 2.0 * g.max_spacing(), "sigma must exceed twice the grid spacing");
  require(codomain >= 2, "codomain must be at least 2");
  require(variant == Variant::hmhf || codomain == 2, "codomain must be 2 unless variant is hmhf");
  require(variant == Variant::hmhf || dim >= 2, "dim 1 is only supported by the hmhf variant");
  require(variant != Variant::pinning || dim == 2, "pinning requires dim 2");
  require(known_kind(initial.kind), "initial.kind: unknown value '" + initial.kind + "'");
  const std::string& k = initial.kind;
  if (k == "circle" || k == "straight_pair") require(dim == 3, "initial." + k + " requires dim 3");
  if (k == "dipole") require(dim == 2, "initial.dipole requires dim 2");
  if (k == "analytic_line") require(dim >= 2, "initial.analytic_line requires dim 2 or 3");
  if (k == "file") require(!initial.path.empty(), "initial.path is required for kind file");
  if (k == "constant") {
    require(initial.value.size() == static_cast<std::size_t>(codomain), "initial.value needs codomain entries");
    double s = 0.0;
    for (double v : initial.value) s += v * v;
    require(std::abs(std::sqrt(s) - 1.0) <= 1e-12, "initial.value must be a unit vector");
  }
  require(initial.R0 > 0.0, "initial.R0 must be positive");
  require(initial.normal_axis >= 0 && initial.normal_axis < 3, "initial.normal_axis must be 0, 1 or 2");
  if (k == "straight_pair" || k == "plane_wave")
    require(initial.axis >= 0 && initial.axis < dim, "initial.axis must be an active axis");
  require(initial.sign == 1 || initial.sign == -1, "initial.sign must be +1 or -1");
  require(initial.kmax >= 1, "initial.kmax must be at least 1");
  require(initial.angle > 0.0 && initial.angle < std::numbers::pi, "initial.angle must lie in (0, pi)");
  require(std::abs(potential.amplitude) < 1.0, "potential.amplitude must lie in (-1, 1)");
  require(potential.axis >= 0 && potential.axis < dim, "potential.axis must be an active axis");
  for (int a = 0; a < dim; ++a) require(mask.lo[a] < mask.hi[a], "mask.lo must be below mask.hi");
  require(diagnostics.extraction_every >= 0, "diagnostics.extraction_every must be non-negative");
  require(diagnostics.snapshot_every >= 0, "diagnostics.snapshot_every must be non-negative");
  require(diagnostics.zeta_radius > 0.0, "diagnostics.zeta_radius must be positive");
  require(!output.empty(), "output must not be empty");
  if (diagnostics.gronwall || diagnostics.el_residuals) {
    require(dim == 3 && variant == Variant::periodic && (k == "circle" || k == "straight_pair"),
            "gronwall and el_residuals need a periodic circle or straight_pair run");
    require(k != "circle" || static_cast<double>(steps) * h < initial.R0 * initial.R0 / 2.0,
            "gronwall and el_residuals need the reference circle to survive until the final step");
  }
}

std::string SimulationConfig::to_json() const {
  json j;
  j["variant"] = std::string(variant_name(variant));
  j["dim"] = dim;
  j["resolution"] = json::array();
  j["period"] = json::array();
  for (int a = 0; a < dim; ++a) {
    j["resolution"].push_back(resolution[a]);
    j["period"].push_back(period[a]);
  }
  j["h"] = h;
  j["steps"] = steps;
  j["sigma"] = sigma;
  j["codomain"] = codomain;
  j["seed"] = seed;
  j["output"] = output;
  j["initial"] = {{"kind", initial.kind},
                  {"R0", initial.R0},
                  {"center", point_json(initial.center)},
                  {"normal_axis", initial.normal_axis},
                  {"axis", initial.axis},
                  {"a", initial.a},
                  {"b", initial.b},
                  {"p", initial.p},
                  {"q", initial.q},
                  {"point", initial.point},
                  {"sign", initial.sign},
                  {"kmax", initial.kmax},
                  {"angle", initial.angle},
                  {"value", initial.value},
                  {"path", initial.path}};
  j["potential"] = {{"amplitude", potential.amplitude}, {"axis", potential.axis}, {"invert", potential.invert}};
  j["mask"] = {{"lo", point_json(mask.lo)}, {"hi", point_json(mask.hi)}};
  j["diagnostics"] = {{"ledger", diagnostics.ledger},
                      {"gronwall", diagnostics.gronwall},
                      {"el_residuals", diagnostics.el_residuals},
                      {"extraction_every", diagnostics.extraction_every},
                      {"snapshot_every", diagnostics.snapshot_every},
                      {"zeta_center", point_json(diagnostics.zeta_center)},
                      {"zeta_radius", diagnostics.zeta_radius}};
  return j.dump();
}

std::string SimulationConfig::hash() const {
  std::uint64_t x = 0xcbf29ce484222325ull;
  for (unsigned char ch : to_json()) {
    x ^= ch;
    x *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

SimulationConfig SimulationConfig::parse(std::string_view text, std::span<const std::string> overrides) {
  json file = json::parse(text, nullptr, false, true);
  if (file.is_discarded()) throw InvalidArgument("config is not valid JSON");
  const json schema = defaults_json();
  json doc = schema;
  merge(doc, file, schema, "");
  for (const auto& o : overrides) apply_override(doc, schema, o);
  SimulationConfig c;
  try {
    c = from_json(doc);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

SimulationConfig SimulationConfig::load(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), overrides);
}

std::string config_template() {
  return R"({
  // periodic | neumann | dirichlet | pinning | hmhf
  "variant": "periodic",
  // 2 or 3 (1 only for hmhf); resolution and period have dim entries
  "dim": 3,
  "resolution": [128, 128, 128],
  "period": [1.0, 1.0, 1.0],
  // time step and number of steps
  "h": 0.0002,
  "steps": 50,
  // localization scale, must exceed twice the grid spacing
  "sigma": 0.08,
  // target sphere S^{codomain-1}; 2 unless variant is hmhf
  "codomain": 2,
  "seed": 1,
  "initial": {
    // straight_pair | circle | dipole | file | constant | plane_wave | random_smooth |
    // random_geodesic | analytic_line
    "kind": "circle",
    "R0": 0.25,
    "center": [0.5, 0.5, 0.5],
    "normal_axis": 2,
    // line direction (straight_pair) or wave axis (plane_wave)
    "axis": 2,
    // straight_pair: positions of the +1 and -1 lines in the two other axes
    "a": [0.25, 0.5],
    "b": [0.75, 0.5],
    // dipole: degree +1 and -1 vortices
    "p": [0.25, 0.25],
    "q": [0.25, 0.75],
    // analytic_line: position of the line
    "point": [0.5, 0.5],
    "sign": 1,
    // random_smooth, random_geodesic: largest mode
    "kmax": 2,
    // random_geodesic: largest distance from the pole
    "angle": 1.5,
    // constant: unit vector with codomain entries
    "value": [1.0, 0.0],
    // file: snapshot stem, or a curve CSV
    "path": ""
  },
  // pinning weight a = 1 + amplitude cos(2 pi x_axis / L), or 1 / a when inverted
  "potential": {"amplitude": 0.25, "axis": 0, "invert": false},
  // neumann and dirichlet domain [lo, hi) per axis
  "mask": {"lo": [0.0, 0.0, 0.0], "hi": [1.0, 1.0, 1.0]},
  "diagnostics": {
    "ledger": true,
    "gronwall": false,
    "el_residuals": false,
    // 0 disables extraction
    "extraction_every": 5,
    // 0 keeps only the initial and final snapshots
    "snapshot_every": 0,
    // bump for the outer residual
    "zeta_center": [0.5, 0.5, 0.5],
    "zeta_radius": 0.1
  },
  "output": "out"
}
)";
}

VectorField initial_field(const SimulationConfig& cfg) {
  cfg.validate();
  const TorusGrid g = cfg.grid();
  const InitialSpec& in = cfg.initial;
  const int N = cfg.codomain;
  if (in.kind == "circle" || in.kind == "straight_pair") {
    const std::vector<Curve> curves = seed_curves(cfg, 0.0);
    return periodic_filament_field(g, curves);
  }
  if (in.kind == "dipole") {
    const PointVortex v[] = {{in.p, 1}, {in.q, -1}};
    return periodic_vortex_field(g, v);
  }
  if (in.kind == "file") {
    const std::filesystem::path p(in.path);
    if (p.extension() == ".csv") {
      const Curve c[] = {read_curve_csv(p, cfg.period)};
      return periodic_filament_field(g, c);
    }
    VectorField u = load_field(p, N);
    if (!(u.grid() == g)) throw InvalidArgument("initial.path: snapshot grid differs from the configured grid");
    return u;
  }
  if (in.kind == "constant") return VectorField::constant(g, in.value);
  if (in.kind == "plane_wave") {
    const int axis = in.axis;
    return sample(g, N, [&](const Point& x, std::span<double> out) {
      const double th = 2.0 * std::numbers::pi * x[axis] / g.period(axis);
      std::fill(out.begin(), out.end(), 0.0);
      out[0] = std::cos(th);
      out[1] = std::sin(th);
    });
  }
  if (in.kind == "random_smooth") return detail::random_smooth_field(g, N, cfg.seed, in.kmax);
  if (in.kind == "random_geodesic") return detail::random_geodesic_field(g, N, cfg.seed, in.kmax, in.angle);
  // analytic_line
  const std::array<double, 2> pt = in.point;
  return analytic_filament_field(g, [pt](double) { return pt; }, in.sign);
}

ScalarField mask_field(const SimulationConfig& cfg) {
  const TorusGrid g = cfg.grid();
  return sample_scalar(g, [&](const Point& x) {
    for (int a = 0; a < g.dim(); ++a)
      if (x[a] < cfg.mask.lo[a] || x[a] >= cfg.mask.hi[a]) return 0.0;
    return 1.0;
  });
}

PinningPotential potential_field(const SimulationConfig& cfg) {
  const TorusGrid g = cfg.grid();
  const PotentialSpec p = cfg.potential;
  return PinningPotential(sample_scalar(g, [&](const Point& x) {
    const double a = 1.0 + p.amplitude * std::cos(2.0 * std::numbers::pi * x[p.axis] / g.period(p.axis));
    return p.invert ? 1.0 / a : a;
  }));
}

std::optional<std::vector<Curve>> reference_curves(const SimulationConfig& cfg, double t) {
  if (cfg.dim != 3 || cfg.variant != Variant::periodic) return std::nullopt;
  if (cfg.initial.kind == "circle" && t >= cfg.initial.R0 * cfg.initial.R0 / 2.0) return std::nullopt;
  if (cfg.initial.kind != "circle" && cfg.initial.kind != "straight_pair") return std::nullopt;
  return seed_curves(cfg, t);
}

}  // namespace codim2
