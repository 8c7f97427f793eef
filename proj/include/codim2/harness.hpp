#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codim2/geometry.hpp"
#include "codim2/grid.hpp"
#include "codim2/mbo.hpp"

namespace codim2 {

enum class Variant { periodic, neumann, dirichlet, pinning, hmhf };
std::string_view variant_name(Variant v);

struct InitialSpec {
  // straight_pair | circle | dipole | file | constant | plane_wave | random_smooth |
  // random_geodesic | analytic_line
  std::string kind = "circle";
  double R0 = 0.25;
  Point center{0.5, 0.5, 0.5};
  int normal_axis = 2;
  int axis = 2;                        // straight_pair line direction, plane_wave axis
  std::array<double, 2> a{0.25, 0.5};  // straight_pair: +1 line, in the two other axes
  std::array<double, 2> b{0.75, 0.5};  // straight_pair: -1 line
  std::array<double, 2> p{0.25, 0.25};  // dipole: degree +1
  std::array<double, 2> q{0.25, 0.75};  // dipole: degree -1
  std::array<double, 2> point{0.5, 0.5};  // analytic_line: x' position of the line
  int sign = 1;
  int kmax = 2;
  double angle = 1.5;                  // random_geodesic: largest distance from the pole
  std::vector<double> value{1.0, 0.0};
  std::string path;
};

struct PotentialSpec {
  double amplitude = 0.25;  // a = 1 + amplitude cos(2 pi x_axis / L_axis)
  int axis = 0;
  bool invert = false;      // use 1 / a instead
};

struct MaskSpec {
  Point lo{0.0, 0.0, 0.0};  // chi = 1 on [lo, hi) per active axis
  Point hi{1.0, 1.0, 1.0};
};

struct DiagnosticsSpec {
  bool ledger = true;
  bool gronwall = false;
  bool el_residuals = false;
  int extraction_every = 5;
  int snapshot_every = 0;  // 0 keeps only the initial and final snapshots
  Point zeta_center{0.5, 0.5, 0.5};
  double zeta_radius = 0.1;
};

struct SimulationConfig {
  Variant variant = Variant::periodic;
  int dim = 3;
  Index3 resolution{128, 128, 128};
  std::array<double, 3> period{1.0, 1.0, 1.0};
  double h = 2e-4;
  int steps = 50;
  double sigma = 0.08;
  int codomain = 2;
  std::uint64_t seed = 1;
  InitialSpec initial;
  PotentialSpec potential;
  MaskSpec mask;
  DiagnosticsSpec diagnostics;
  std::string output = "out";

  TorusGrid grid() const;
  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  /// Canonical JSON document (sorted keys, no comments).
  std::string to_json() const;
  /// FNV-1a 64 of the canonical document, as 16 hex digits.
  std::string hash() const;

  /// Parses a JSON document (comments allowed) over the defaults, then applies
  /// `key.path=value` overrides. Unknown keys are rejected.
  static SimulationConfig parse(std::string_view text, std::span<const std::string> overrides = {});
  static SimulationConfig load(const std::filesystem::path& path, std::span<const std::string> overrides = {});
};

/// Commented template listing every key with its default.
std::string config_template();

/// Fields built from a config.
VectorField initial_field(const SimulationConfig& cfg);
ScalarField mask_field(const SimulationConfig& cfg);
PinningPotential potential_field(const SimulationConfig& cfg);
/// Reference curves at time t when the initial data has a smooth
/// evolution to compare against (shrinking circle, static straight pair).
std::optional<std::vector<Curve>> reference_curves(const SimulationConfig& cfg, double t);

// Snapshots: <stem>.json sidecar plus <stem>.bin little-endian f64 payload,
// C-order over nodes with components interleaved.
struct SnapshotMeta {
  double time = 0.0;
  double h = 0.0;
  std::string kind = "u";
};
void save_field(const VectorField& u, const std::filesystem::path& stem, const SnapshotMeta& meta = {});
VectorField load_field(const std::filesystem::path& stem, std::optional<int> expected_codomain = std::nullopt,
                       SnapshotMeta* meta = nullptr);

struct RunRow {
  std::size_t step = 0;
  double time = 0.0;
  double e_h = 0.0;
  double e_h_local = 0.0;  // NaN without a reference curve
  double dissipation_cum = 0.0;
  double metric = 0.0;
  double radius_est = 0.0;  // NaN when not measured at this step
  bool ledger_ok = true;
  double excess = 0.0;
  double max_deficit = 0.0;  // 1 - min |G_h * u| on the domain
};

struct ExtractionSummary {
  std::size_t step = 0;
  bool ok = true;
  std::size_t curves = 0;
  double length = 0.0;
  std::string diagnostic;
};

struct RunRecord {
  std::vector<RunRow> rows;
  std::vector<ExtractionSummary> extractions;
  std::string config_hash;
  std::string code_version;
  bool ledger_ok = true;
  bool energy_nonincreasing = true;
  std::optional<double> gronwall_max;
  std::optional<double> gronwall_dissipation;
  std::optional<double> el_inner;
  std::optional<double> el_outer;
  std::optional<double> kappa_h_ratio;  // -(R_N^2 - R_{N-1}^2) / (2h) on circle runs
  std::optional<double> final_radius;
};

struct RunOptions {
  bool persist = true;
  /// Called with every state, including the initial one.
  std::function<void(const VectorField&, std::size_t step)> observer;
};

/// Iterates the configured step. Throws LedgerViolation (after writing a
/// diagnostic dump when persisting) if some step raises the energy by more
/// than 1e-9.
RunRecord run(const SimulationConfig& cfg, const RunOptions& options = {});

void write_record_csv(const RunRecord& r, const std::filesystem::path& path);
std::string record_summary(const RunRecord& r);

struct ConvergenceRow {
  double h = 0.0;
  int steps = 0;
  double radius = 0.0;
  double radius_reference = 0.0;
  double radius_sq_error = 0.0;
  double kappa_h_ratio = 0.0;
  double gronwall_max = 0.0;
  double el_inner = 0.0;
  double el_outer = 0.0;
  bool extraction_ok = true;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double error_slope = 0.0;  // least-squares slope of log radius_sq_error against log h
};

/// Runs the base config (a circle) at every h up to the base final time.
/// Throws if extraction fails at any h.
ConvergenceTable convergence_study(const SimulationConfig& base, std::span<const double> h_list,
                                   bool persist = false);
void write_convergence_csv(const ConvergenceTable& t, const std::filesystem::path& path);
std::string convergence_summary(const ConvergenceTable& t);

struct SuiteCheck {
  std::string name;
  double value;
  double bound;
  bool pass;
  double seconds;
};
/// identities | monotonicity | el | variants
std::vector<SuiteCheck> run_suite(std::string_view suite, std::uint64_t seed = 1);

}  // namespace codim2
