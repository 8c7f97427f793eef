#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "codim2/energy.hpp"
#include "codim2/errors.hpp"
#include "codim2/harness.hpp"
#include "codim2/spectral.hpp"
#include "internal.hpp"

namespace codim2 {
namespace {

constexpr double kRowTolerance = 1e-11;
constexpr double kAbortTolerance = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string snapshot_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u_%06zu", step);
  return buf;
}

// Energy weight and step operation of one variant.
struct Scheme {
  ScalarField weight;
  std::function<StepOutcome(const VectorField&)> step;
};

Scheme make_scheme(const SimulationConfig& cfg, VectorField& u) {
  const TorusGrid g = cfg.grid();
  const double h = cfg.h;
  switch (cfg.variant) {
    case Variant::periodic:
      return {ScalarField(g, 1.0), [h](const VectorField& x) { return mbo_step(x, h); }};
    case Variant::hmhf:
      return {ScalarField(g, 1.0), [h](const VectorField& x) { return hmhf_step(x, h); }};
    case Variant::neumann: {
      ScalarField chi = mask_field(cfg);
      validate_mask(chi);
      u = multiply(chi, u);
      return {chi, [h, chi](const VectorField& x) { return neumann_step(x, chi, h); }};
    }
    case Variant::dirichlet: {
      ScalarField chi = mask_field(cfg);
      validate_mask(chi);
      const VectorField ubar = u;
      return {ScalarField(g, 1.0), [h, chi, ubar](const VectorField& x) { return dirichlet_step(x, chi, ubar, h); }};
    }
    case Variant::pinning: {
      const PinningPotential a = potential_field(cfg);
      return {a.a(), [h, a](const VectorField& x) { return pinning_step(x, a, h); }};
    }
  }
  throw InvalidArgument("unknown variant");
}

// (1/h) \int w (1 - u . G_h u) with G_h u precomputed.
double weighted_energy(const ScalarField& w, const VectorField& u, const VectorField& gu, double h) {
  ScalarField deficit(u.grid(), 1.0);
  const ScalarField dot = nodewise_dot(u, gu);
  for (std::size_t k = 0; k < deficit.size(); ++k) deficit[k] -= dot[k];
  return integrate(w * deficit) / h;
}

double max_deficit(const ScalarField& w, const VectorField& gu) {
  double worst = 0.0;
  for (std::size_t k = 0; k < gu.nodes(); ++k) {
    if (w[k] == 0.0) continue;
    double s = 0.0;
    for (int c = 0; c < gu.codomain(); ++c) s += gu.at(k, c) * gu.at(k, c);
    worst = std::max(worst, 1.0 - std::sqrt(s));
  }
  return worst;
}

bool extracts(const SimulationConfig& cfg) {
  return cfg.codomain == 2 && cfg.dim >= 2 && (cfg.variant == Variant::periodic || cfg.variant == Variant::pinning);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

RunRecord run(const SimulationConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const TorusGrid g = cfg.grid();
  const double h = cfg.h;
  const auto& diag = cfg.diagnostics;
  const std::filesystem::path out(cfg.output);
  const bool circle = cfg.initial.kind == "circle" && cfg.dim == 3 && cfg.variant == Variant::periodic;

  RunRecord rec;
  rec.config_hash = cfg.hash();
  rec.code_version = CODIM2_VERSION;

  VectorField u = initial_field(cfg);
  Scheme scheme = make_scheme(cfg, u);
  const ScalarField& w = scheme.weight;

  if (options.persist) {
    std::filesystem::create_directories(out);
    write_text(out / "config.json", cfg.to_json() + "\n");
    save_field(u, out / snapshot_name(0), {0.0, h, "u"});
  }

  const bool static_reference = cfg.initial.kind == "straight_pair";
  std::optional<std::pair<double, detail::Localization>> cached;
  auto localization_at = [&](double t) -> const detail::Localization& {
    if (!cached || (!static_reference && cached->first != t)) cached.emplace(t, detail::localize(cfg, t));
    return cached->second;
  };
  std::optional<GronwallMonitor> monitor;
  if (diag.gronwall) monitor.emplace(h, [&](double t) { return localization_at(t).phi; });
  std::optional<ScalarField> zeta;
  if (diag.el_residuals) zeta = detail::bump(g, diag.zeta_center, diag.zeta_radius);
  double el_inner = 0.0, el_outer = 0.0;

  auto measure = [&](const VectorField& x, std::size_t step, RunRow& row) {
    const bool final_pair = circle && step + 1 >= static_cast<std::size_t>(cfg.steps);
    const bool cadence = diag.extraction_every > 0 && step % diag.extraction_every == 0;
    if (!extracts(cfg) || !(cadence || final_pair || step == static_cast<std::size_t>(cfg.steps))) return;
    ExtractionSummary s{step, true, 0, 0.0, {}};
    if (cfg.dim == 2) {
      s.curves = extract_vortices(x).size();
    } else {
      const double dx = g.max_spacing();
      const ExtractionResult e = extract_vorticity(x, dx * dx / 4.0);
      s.ok = e.ok;
      s.diagnostic = e.diagnostic;
      s.curves = e.curves.size();
      for (const auto& c : e.curves) s.length += c.length();
      if (circle && e.ok && e.curves.size() == 1) row.radius_est = detail::polygon_radius(e.curves[0]);
      if (options.persist)
        for (std::size_t k = 0; k < e.curves.size(); ++k)
          write_curve_csv(e.curves[k], out / (snapshot_name(step).substr(2) + "_curve_" + std::to_string(k) + ".csv"));
    }
    rec.extractions.push_back(std::move(s));
  };

  VectorField gu = heat_convolve(u, h);
  double e_prev = weighted_energy(w, u, gu, h);
  {
    RunRow row{0, 0.0, e_prev, kNaN, 0.0, 0.0, kNaN, true, 0.0, max_deficit(w, gu)};
    if (monitor) {
      monitor->push(u);
      row.e_h_local = monitor->samples().back().localized_energy;
    }
    measure(u, 0, row);
    rec.rows.push_back(row);
  }
  if (options.observer) options.observer(u, 0);

  double cum = 0.0;
  for (std::size_t n = 1; n <= static_cast<std::size_t>(cfg.steps); ++n) {
    const double t = static_cast<double>(n) * h;
    VectorField next = scheme.step(u).u_next;
    VectorField g_next = heat_convolve(next, h);
    RunRow row{n, t, weighted_energy(w, next, g_next, h), kNaN, 0.0, 0.0, kNaN, true, 0.0, max_deficit(w, g_next)};

    if (diag.ledger) {
      row.metric = weighted_dot_integral(w, next - u, g_next - gu) / h;
      row.excess = row.e_h + row.metric - e_prev;
      row.ledger_ok = row.excess <= kRowTolerance;
      if (row.excess > kAbortTolerance) {
        if (options.persist) {
          save_field(u, out / "violation_prev", {t - h, h, "u"});
          save_field(next, out / "violation_next", {t, h, "u"});
          rec.rows.push_back(row);
          rec.ledger_ok = false;
          write_record_csv(rec, out / "record.csv");
        }
        std::ostringstream msg;
        msg << "ledger violation at step " << n << ": excess " << row.excess;
        throw LedgerViolation(msg.str(), n, row.excess);
      }
    }
    cum += row.metric;
    row.dissipation_cum = cum;

    if (monitor) {
      monitor->push(next);
      row.e_h_local = monitor->samples().back().localized_energy;
    }
    if (diag.el_residuals) {
      el_inner += el_inner_step(u, next, h, localization_at(t).xi).residual();
      el_outer += el_outer_weak_step(u, next, h, *zeta, 0, 1);
    }
    measure(next, n, row);

    rec.ledger_ok = rec.ledger_ok && row.ledger_ok;
    if (row.e_h > e_prev + kRowTolerance) rec.energy_nonincreasing = false;
    rec.rows.push_back(row);

    if (options.observer) options.observer(next, n);
    const bool last = n == static_cast<std::size_t>(cfg.steps);
    if (options.persist && (last || (diag.snapshot_every > 0 && n % diag.snapshot_every == 0)))
      save_field(next, out / snapshot_name(n), {t, h, "u"});

    u = std::move(next);
    gu = std::move(g_next);
    e_prev = row.e_h;
  }

  if (monitor) {
    rec.gronwall_max = monitor->max();
    rec.gronwall_dissipation = monitor->samples().back().dissipation_cum;
  }
  if (diag.el_residuals) {
    rec.el_inner = std::abs(el_inner);
    rec.el_outer = std::abs(el_outer);
  }
  const std::size_t N = rec.rows.size() - 1;
  if (circle && !std::isnan(rec.rows[N].radius_est)) {
    rec.final_radius = rec.rows[N].radius_est;
    if (N >= 1 && !std::isnan(rec.rows[N - 1].radius_est)) {
      const double a = rec.rows[N - 1].radius_est, b = rec.rows[N].radius_est;
      rec.kappa_h_ratio = -(b * b - a * a) / (2.0 * h);
    }
  }
  if (options.persist) {
    write_record_csv(rec, out / "record.csv");
    write_text(out / "summary.txt", record_summary(rec));
  }
  return rec;
}

}  // namespace codim2
