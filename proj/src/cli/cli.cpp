#include "codim2/cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "codim2/energy.hpp"
#include "codim2/errors.hpp"
#include "codim2/geometry.hpp"
#include "codim2/spectral.hpp"

namespace codim2 {
namespace {

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::string h_list;
  std::string suite;
  std::string field;
  std::uint64_t seed = 1;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

SimulationConfig load_config(const Options& o) {
  if (!std::filesystem::exists(o.config)) throw InvalidArgument("config file not found: " + o.config);
  std::vector<std::string> sets = o.sets;
  if (!o.out.empty()) sets.push_back("output=" + o.out);
  return SimulationConfig::load(o.config, sets);
}

std::vector<double> parse_h_list(const std::string& text) {
  std::vector<double> hs;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !(v > 0.0)) throw InvalidArgument("--h: cannot parse '" + item + "'");
    hs.push_back(v);
  }
  return hs;
}

int cmd_run(const Options& o, std::ostream& out) {
  const SimulationConfig cfg = load_config(o);
  const RunRecord r = run(cfg);
  out << record_summary(r);
  out << "wrote " << (std::filesystem::path(cfg.output) / "record.csv").string() << "\n";
  return r.ledger_ok ? 0 : 2;
}

int cmd_converge(const Options& o, std::ostream& out) {
  const SimulationConfig cfg = load_config(o);
  const auto hs = parse_h_list(o.h_list.empty() ? "4e-4,2e-4,1e-4" : o.h_list);
  const ConvergenceTable t = convergence_study(cfg, hs, true);
  const auto stem = std::filesystem::path(cfg.output) / "convergence";
  emit_report(t, stem);
  out << convergence_summary(t);
  out << "wrote " << stem.string() << ".csv\n";
  return 0;
}

int cmd_energy(const Options& o, std::ostream& out) {
  const SimulationConfig cfg = load_config(o);
  const VectorField u = o.field.empty() ? initial_field(cfg) : load_field(o.field, cfg.codomain);
  const double h = cfg.h;
  char line[128];
  auto emit = [&](const char* name, double v) {
    std::snprintf(line, sizeof line, "%-22s %.17g\n", name, v);
    out << line;
  };
  emit("h", h);
  emit("e_h", e_h(u, h));
  emit("e_h_fourier", e_h_fourier(u, h));
  emit("dirichlet_mollified", dirichlet_mollified(u, h));
  if (const auto curves = reference_curves(cfg, 0.0)) {
    const ScalarField phi = phi_sigma(u.grid(), *curves, cfg.sigma);
    emit("e_h_localized", e_h_localized(u, phi, h));
  }
  return 0;
}

int cmd_extract(const Options& o, std::ostream& out) {
  const SimulationConfig cfg = load_config(o);
  const VectorField u = o.field.empty() ? initial_field(cfg) : load_field(o.field, 2);
  const std::filesystem::path dir(cfg.output);
  std::filesystem::create_directories(dir);
  if (u.grid().dim() == 2) {
    std::ostringstream csv;
    csv << "axis0,axis1,degree\n";
    char row[96];
    for (const auto& v : extract_vortices(u)) {
      std::snprintf(row, sizeof row, "%.17g,%.17g,%d\n", v.position[0], v.position[1], v.degree);
      csv << row;
    }
    write_text(dir / "vortices.csv", csv.str());
    out << "wrote " << (dir / "vortices.csv").string() << "\n";
    return 0;
  }
  const double dx = u.grid().max_spacing();
  const ExtractionResult e = extract_vorticity(u, dx * dx / 4.0);
  out << "piercings " << e.raw.size() << "\n";
  if (!e.ok) {
    out << "extraction failed: " << e.diagnostic << "\n";
    return 2;
  }
  for (std::size_t k = 0; k < e.curves.size(); ++k) {
    const auto path = dir / ("curve_" + std::to_string(k) + ".csv");
    write_curve_csv(e.curves[k], path);
    out << "curve " << k << " vertices " << e.curves[k].size() << " length " << e.curves[k].length() << " -> "
        << path.string() << "\n";
  }
  return 0;
}

int cmd_check(const Options& o, std::ostream& out) {
  const auto checks = run_suite(o.suite, o.seed);
  bool ok = true;
  char line[160];
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "[%s] %-32s value %-12.4g bound %-10.3g %.2fs\n", c.pass ? "PASS" : "FAIL",
                  c.name.c_str(), c.value, c.bound, c.seconds);
    out << line;
    ok = ok && c.pass;
  }
  return ok ? 0 : 2;
}

int cmd_init(const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    out << config_template();
  } else {
    write_text(o.out, config_template());
    out << "wrote " << o.out << "\n";
  }
  return 0;
}

}  // namespace

void emit_report(const RunRecord& record, const std::filesystem::path& stem) {
  write_record_csv(record, stem.string() + ".csv");
  write_text(stem.string() + ".txt", record_summary(record));
}

void emit_report(const ConvergenceTable& table, const std::filesystem::path& stem) {
  write_convergence_csv(table, stem.string() + ".csv");
  write_text(stem.string() + ".txt", convergence_summary(table));
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thresholding simulator for vortex filaments and point vortices", "codim2"};
  app.require_subcommand(1, 1);
  app.footer("\nConfig schema (JSON, comments allowed):\n" + config_template());
  Options o;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config file")->required();
    sub->add_option("--set", o.sets, "Override key.path=value (repeatable)");
    sub->add_option("--out", o.out, "Output directory");
  };
  CLI::App* run_cmd = app.add_subcommand("run", "Run a simulation and persist its record");
  add_config(run_cmd);
  CLI::App* converge_cmd = app.add_subcommand("converge", "Circle convergence study over several h");
  add_config(converge_cmd);
  converge_cmd->set_help_flag("--help", "Print this help message and exit");
  converge_cmd->add_option("--h", o.h_list, "Comma-separated decreasing time steps");
  CLI::App* energy_cmd = app.add_subcommand("energy", "Energy diagnostics of the initial field or a snapshot");
  add_config(energy_cmd);
  energy_cmd->add_option("--field", o.field, "Snapshot stem");
  CLI::App* extract_cmd = app.add_subcommand("extract", "Extract the vorticity set");
  add_config(extract_cmd);
  extract_cmd->add_option("--field", o.field, "Snapshot stem");
  CLI::App* check_cmd = app.add_subcommand("check", "Run an invariant suite");
  check_cmd->add_option("--suite", o.suite, "Suite name")
      ->required()
      ->check(CLI::IsMember({"identities", "monotonicity", "el", "variants"}));
  check_cmd->add_option("--seed", o.seed, "Seed for random fields");
  CLI::App* init_cmd = app.add_subcommand("init", "Write a commented template config");
  init_cmd->add_option("--out", o.out, "Destination file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(o, out);
    if (converge_cmd->parsed()) return cmd_converge(o, out);
    if (energy_cmd->parsed()) return cmd_energy(o, out);
    if (extract_cmd->parsed()) return cmd_extract(o, out);
    if (check_cmd->parsed()) return cmd_check(o, out);
    return cmd_init(o, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const TopologyError& e) {
    err << "error: " << e.what() << " (axis " << e.axis() << ")\n";
    return 1;
  } catch (const LedgerViolation& e) {
    err << "ledger violation at step " << e.step() << ": excess " << e.excess() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace codim2
