#include <cmath>
#include <cstdio>

#include "codim2/errors.hpp"
#include "codim2/harness.hpp"
#include "codim2/parallel.hpp"

namespace codim2 {

ConvergenceTable convergence_study(const SimulationConfig& base, std::span<const double> h_list, bool persist) {
  base.validate();
  if (h_list.size() < 3) throw InvalidArgument("convergence_study: need at least 3 values of h");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1])) throw InvalidArgument("convergence_study: h_list must be decreasing");
  if (base.initial.kind != "circle" || base.variant != Variant::periodic || base.dim != 3)
    throw InvalidArgument("convergence_study: base config must be a periodic circle run");
  const double t_end = base.h * base.steps;
  const double reference = circle_reference(base.initial.R0, t_end);

  ConvergenceTable table;
  table.rows.resize(h_list.size());
  parallel_for(h_list.size(), [&](std::size_t i) {
    SimulationConfig cfg = base;
    cfg.h = h_list[i];
    cfg.steps = static_cast<int>(std::lround(t_end / cfg.h));
    if (std::abs(cfg.steps * cfg.h - t_end) > 1e-9 * t_end)
      throw InvalidArgument("convergence_study: h does not divide the final time");
    cfg.diagnostics.gronwall = true;
    cfg.diagnostics.el_residuals = true;
    char sub[32];
    std::snprintf(sub, sizeof sub, "h_%.3g", cfg.h);
    cfg.output = (std::filesystem::path(base.output) / sub).string();
    const RunRecord r = run(cfg, {persist, {}});

    ConvergenceRow row;
    row.h = cfg.h;
    row.steps = cfg.steps;
    row.radius_reference = reference;
    row.extraction_ok = r.final_radius.has_value() && r.kappa_h_ratio.has_value();
    for (const auto& e : r.extractions) row.extraction_ok = row.extraction_ok && e.ok;
    if (!row.extraction_ok) throw std::runtime_error("convergence_study: extraction failed at h=" + std::to_string(cfg.h));
    row.radius = *r.final_radius;
    row.radius_sq_error = std::abs(row.radius * row.radius - reference * reference);
    row.kappa_h_ratio = *r.kappa_h_ratio;
    row.gronwall_max = r.gronwall_max.value_or(0.0);
    row.el_inner = r.el_inner.value_or(0.0);
    row.el_outer = r.el_outer.value_or(0.0);
    table.rows[i] = row;
  });

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(table.rows.size());
  for (const auto& r : table.rows) {
    const double x = std::log(r.h), y = std::log(r.radius_sq_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  table.error_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return table;
}

}  // namespace codim2
