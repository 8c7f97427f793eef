#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "codim2/energy.hpp"
#include "codim2/errors.hpp"
#include "codim2/harness.hpp"
#include "codim2/spectral.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace codim2;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("codim2_test_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SimulationConfig small_periodic(int n) {
  SimulationConfig c;
  c.resolution = {n, n, n};
  c.sigma = 0.3;
  c.steps = 3;
  c.h = 1e-3;
  c.diagnostics.extraction_every = 0;
  return c;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config defaults, comments and template round-trip") {
  const SimulationConfig d;
  CHECK(SimulationConfig::parse("{}").to_json() == d.to_json());
  CHECK(SimulationConfig::parse("// empty\n{ /* nothing */ }").to_json() == d.to_json());
  CHECK(SimulationConfig::parse(config_template()).to_json() == d.to_json());
  CHECK_NOTHROW(d.validate());
}

TEST_CASE("config overrides and rejection of unknown or mistyped keys") {
  const std::vector<std::string> sets{"h=0.001", "initial.R0=0.3", "variant=\"hmhf\"", "output=/tmp/x", "codomain=3"};
  const auto c = SimulationConfig::parse("{\"steps\": 7}", sets);
  CHECK(c.steps == 7);
  CHECK(c.h == 0.001);
  CHECK(c.initial.R0 == 0.3);
  CHECK(c.variant == Variant::hmhf);
  CHECK(c.output == "/tmp/x");
  CHECK(c.codomain == 3);

  CHECK_THROWS_AS(SimulationConfig::parse("{\"stpes\": 7}"), InvalidArgument);
  CHECK_THROWS_AS(SimulationConfig::parse("{\"initial\": {\"radius\": 1}}"), InvalidArgument);
  CHECK_THROWS_AS(SimulationConfig::parse("{\"steps\": 1.5}"), InvalidArgument);
  CHECK_THROWS_AS(SimulationConfig::parse("{\"h\": \"small\"}"), InvalidArgument);
  CHECK_THROWS_AS(SimulationConfig::parse("{\"variant\": \"spherical\"}"), InvalidArgument);
  CHECK_THROWS_AS(SimulationConfig::parse("{\"resolution\": [8, 8]}"), InvalidArgument);
  CHECK_THROWS_AS(SimulationConfig::parse("{ not json"), InvalidArgument);
  const std::vector<std::string> bad{"nonsense.key=1"};
  CHECK_THROWS_AS(SimulationConfig::parse("{}", bad), InvalidArgument);
}

TEST_CASE("config validation names the offending field") {
  auto rejects = [](const std::vector<std::string>& sets, const std::string& needle) {
    try {
      SimulationConfig::parse("{}", sets).validate();
    } catch (const InvalidArgument& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(rejects({"h=-1"}, "h"));
  CHECK(rejects({"steps=0"}, "steps"));
  CHECK(rejects({"sigma=0.01"}, "sigma"));
  CHECK(rejects({"codomain=3"}, "codomain"));
  CHECK(rejects({"initial.kind=\"dipole\""}, "dipole"));
  CHECK(rejects({"variant=\"pinning\""}, "pinning"));
  CHECK(rejects({"potential.amplitude=1.0"}, "amplitude"));
  CHECK(rejects({"initial.kind=\"constant\"", "initial.value=[1.0, 1.0]"}, "unit"));
  CHECK(rejects({"mask.lo=[0.5, 0.0, 0.0]", "mask.hi=[0.5, 1.0, 1.0]"}, "mask"));
  CHECK(rejects({"initial.kind=\"random_geodesic\"", "initial.angle=4.0"}, "angle"));
}

TEST_CASE("config hash is FNV-1a of the canonical document") {
  const SimulationConfig a;
  CHECK(a.hash().size() == 16);
  CHECK(a.hash() == fnv1a_hex(a.to_json()));
  const std::vector<std::string> sets{"seed=2"};
  const auto b = SimulationConfig::parse("{}", sets);
  CHECK(b.hash() != a.hash());
  CHECK(SimulationConfig::parse(b.to_json()).hash() == b.hash());
}

TEST_CASE("initial fields are unit and match their closed forms") {
  auto c = small_periodic(16);
  c.initial.kind = "plane_wave";
  c.initial.axis = 1;
  const auto pw = initial_field(c);
  CHECK(max_abs_difference(pw, testing::plane_wave(pw.grid(), 1)) <= 1e-15);

  c.initial.kind = "constant";
  c.initial.value = {0.6, 0.8};
  const auto k = initial_field(c);
  CHECK(k.at(123, 0) == 0.6);
  CHECK(k.at(123, 1) == 0.8);

  for (const char* kind : {"random_smooth", "circle", "analytic_line"}) {
    c.initial.kind = kind;
    CHECK(initial_field(c).is_unit());
  }

  c.variant = Variant::hmhf;
  c.codomain = 3;
  c.initial.kind = "random_geodesic";
  c.initial.angle = 1.2;
  const auto u = initial_field(c);
  CHECK(u.is_unit(1e-14));
  double widest = 0.0;
  for (std::size_t n = 0; n < u.nodes(); ++n) widest = std::max(widest, std::acos(std::clamp(u.at(n, 2), -1.0, 1.0)));
  CHECK(widest == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("mask and potential fields") {
  auto c = small_periodic(16);
  c.mask.lo = {0.25, 0.0, 0.0};
  c.mask.hi = {0.75, 1.0, 1.0};
  const auto chi = mask_field(c);
  double count = 0.0;
  for (std::size_t n = 0; n < chi.size(); ++n) count += chi[n];
  CHECK(count == 8.0 * 16 * 16);

  c.variant = Variant::pinning;
  c.dim = 2;
  c.potential.amplitude = 0.25;
  const auto a = potential_field(c).a();
  const auto& g = a.grid();
  for (std::size_t n = 0; n < g.size(); n += 7) {
    const double x = g.position(n)[0];
    CHECK(a[n] == doctest::Approx(1.0 + 0.25 * std::cos(2 * pi * x)).epsilon(1e-15));
  }
  c.potential.invert = true;
  const auto inv = potential_field(c).a();
  for (std::size_t n = 0; n < g.size(); n += 7) CHECK(inv[n] * a[n] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("snapshot round-trip and malformed files") {
  const auto dir = scratch_dir("snapshot");
  const auto g = TorusGrid(2, {1.0, 2.0, 1.0}, {8, 12, 1});
  const auto u = testing::random_unit_field(g, 3, 5);
  save_field(u, dir / "u", {0.5, 1e-3, "u"});
  SnapshotMeta meta;
  const auto back = load_field(dir / "u", 3, &meta);
  CHECK(back.grid() == g);
  CHECK(max_abs_difference(back, u) == 0.0);
  CHECK(meta.time == 0.5);
  CHECK(meta.h == 1e-3);

  CHECK_THROWS_AS(load_field(dir / "u", 2), FormatError);
  CHECK_THROWS_AS(load_field(dir / "missing"), FormatError);

  fs::copy_file(dir / "u.json", dir / "short.json");
  {
    std::ofstream f(dir / "short.bin", std::ios::binary);
    f << "abc";
  }
  CHECK_THROWS_AS(load_field(dir / "short"), FormatError);

  VectorField bad = u;
  bad.at(3, 1) = std::nan("");
  save_field(bad, dir / "nan");
  CHECK_THROWS_AS(load_field(dir / "nan"), FormatError);

  {
    std::ofstream f(dir / "broken.json");
    f << "{\"format_version\": 1";
  }
  fs::copy_file(dir / "u.bin", dir / "broken.bin");
  CHECK_THROWS_AS(load_field(dir / "broken"), FormatError);
}

TEST_CASE("run on fixed points keeps the energy") {
  auto c = small_periodic(16);
  c.initial.kind = "constant";
  c.initial.value = {0.0, 1.0};
  const auto r0 = run(c, {false, {}});
  CHECK(r0.rows.size() == 4);
  for (const auto& row : r0.rows) {
    CHECK(row.e_h == 0.0);
    CHECK(row.ledger_ok);
  }

  c.initial.kind = "plane_wave";
  c.initial.axis = 0;
  const auto r1 = run(c, {false, {}});
  const double closed = (1.0 - std::exp(-4 * pi * pi * c.h)) / c.h;
  for (const auto& row : r1.rows) {
    CHECK(row.e_h == doctest::Approx(closed).epsilon(1e-13));
    CHECK(std::abs(row.metric) <= 1e-12);
  }
  CHECK(r1.ledger_ok);
  CHECK(r1.energy_nonincreasing);
}

TEST_CASE("run ledger rows on rough data") {
  auto c = small_periodic(16);
  c.initial.kind = "random_smooth";
  c.steps = 6;
  std::vector<double> energies;
  const auto r = run(c, {false, [&](const VectorField& u, std::size_t) { energies.push_back(e_h(u, c.h)); }});
  REQUIRE(r.rows.size() == 7);
  REQUIRE(energies.size() == 7);
  double cum = 0.0;
  for (std::size_t n = 1; n < r.rows.size(); ++n) {
    const auto& row = r.rows[n];
    CHECK(row.step == n);
    CHECK(row.time == doctest::Approx(n * c.h).epsilon(1e-15));
    CHECK(row.metric >= 0.0);
    CHECK(row.excess <= 1e-11);
    CHECK(row.e_h + row.metric <= r.rows[n - 1].e_h + 1e-11);
    CHECK(row.e_h == doctest::Approx(energies[n]).epsilon(1e-12));
    cum += row.metric;
    CHECK(row.dissipation_cum == doctest::Approx(cum).epsilon(1e-14));
  }
  CHECK(r.ledger_ok);
  CHECK(r.energy_nonincreasing);
  CHECK(r.config_hash == c.hash());
}

TEST_CASE("bounded variants keep their weighted ledgers") {
  for (Variant v : {Variant::neumann, Variant::dirichlet}) {
    auto c = small_periodic(24);
    c.variant = v;
    c.steps = 5;
    c.initial.kind = "analytic_line";
    c.mask.lo = {0.125, 0.125, 0.0};
    c.mask.hi = {0.875, 0.875, 1.0};
    const auto r = run(c, {false, {}});
    CHECK(r.ledger_ok);
    CHECK(r.energy_nonincreasing);
    CHECK(r.rows.back().e_h < r.rows.front().e_h);
  }
  auto c = small_periodic(32);
  c.variant = Variant::pinning;
  c.dim = 2;
  c.initial.kind = "dipole";
  c.steps = 5;
  const auto r = run(c, {false, {}});
  CHECK(r.ledger_ok);
  REQUIRE(r.extractions.size() == 1);
  CHECK(r.extractions[0].curves == 2);
}

TEST_CASE("persisted run directory") {
  const auto dir = scratch_dir("run");
  auto c = small_periodic(32);
  c.initial.kind = "straight_pair";
  c.steps = 4;
  c.diagnostics.extraction_every = 2;
  c.diagnostics.snapshot_every = 2;
  c.output = dir.string();
  const auto r = run(c);
  CHECK(r.ledger_ok);
  for (const char* name : {"config.json", "record.csv", "summary.txt", "u_000000.json", "u_000002.bin", "u_000004.json",
                           "000004_curve_0.csv", "000004_curve_1.csv"})
    CHECK_MESSAGE(fs::exists(dir / name), name);
  CHECK(SimulationConfig::load(dir / "config.json").hash() == c.hash());

  std::istringstream csv(read_file(dir / "record.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "step,time,e_h,e_h_local,dissipation_cum,metric,radius_est,ledger_ok");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 5);
  CHECK(read_file(dir / "summary.txt").find("[PASS] ledger_ok=true") != std::string::npos);

  const auto last = load_field(dir / "u_000004", 2);
  CHECK(last.is_unit());
}

TEST_CASE("reference curves and diagnostics on the static pair") {
  auto c = small_periodic(32);
  c.initial.kind = "straight_pair";
  c.steps = 2;
  c.diagnostics.gronwall = true;
  c.diagnostics.el_residuals = true;
  const auto ref = reference_curves(c, 0.01);
  REQUIRE(ref.has_value());
  CHECK(ref->size() == 2);
  const auto r = run(c, {false, {}});
  REQUIRE(r.gronwall_max.has_value());
  CHECK(*r.gronwall_max >= 0.0);
  CHECK(std::isfinite(*r.el_inner));
  CHECK(std::isfinite(*r.el_outer));
  CHECK(!std::isnan(r.rows[1].e_h_local));

  c.initial.kind = "random_smooth";
  CHECK(!reference_curves(c, 0.0).has_value());
}

TEST_CASE("convergence study argument checks") {
  const SimulationConfig c;
  const double two[] = {4e-4, 2e-4};
  CHECK_THROWS_AS(convergence_study(c, two), InvalidArgument);
  const double rising[] = {1e-4, 2e-4, 4e-4};
  CHECK_THROWS_AS(convergence_study(c, rising), InvalidArgument);
  auto pair = c;
  pair.initial.kind = "straight_pair";
  const double ok[] = {4e-4, 2e-4, 1e-4};
  CHECK_THROWS_AS(convergence_study(pair, ok), InvalidArgument);
}

TEST_CASE("unknown suite is rejected") { CHECK_THROWS_AS(run_suite("nope"), InvalidArgument); }
