#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "codim2/errors.hpp"
#include "codim2/harness.hpp"

namespace codim2 {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char* kLayout = "C-order, component-interleaved";

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

void to_little(unsigned char* bytes) {
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 8);
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

void save_field(const VectorField& u, const std::filesystem::path& stem, const SnapshotMeta& meta) {
  const TorusGrid& g = u.grid();
  json side;
  side["format_version"] = kFormatVersion;
  side["dim"] = g.dim();
  side["resolution"] = json::array();
  side["period"] = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    side["resolution"].push_back(g.resolution(a));
    side["period"].push_back(g.period(a));
  }
  side["codomain"] = u.codomain();
  side["time"] = meta.time;
  side["h"] = meta.h;
  side["kind"] = meta.kind;
  side["byte_order"] = "little";
  side["scalar"] = "f64";
  side["layout"] = kLayout;
  write_text(with_suffix(stem, ".json"), side.dump(2) + "\n");

  const std::size_t n = u.nodes();
  const int N = u.codomain();
  std::vector<unsigned char> payload(n * N * 8);
  for (std::size_t k = 0; k < n; ++k)
    for (int c = 0; c < N; ++c) {
      unsigned char* dst = payload.data() + (k * N + c) * 8;
      const double v = u.at(k, c);
      std::memcpy(dst, &v, 8);
      to_little(dst);
    }
  std::ofstream out(with_suffix(stem, ".bin"), std::ios::binary);
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("cannot write " + with_suffix(stem, ".bin").string());
}

VectorField load_field(const std::filesystem::path& stem, std::optional<int> expected_codomain, SnapshotMeta* meta) {
  const auto side_path = with_suffix(stem, ".json");
  std::ifstream side_in(side_path);
  if (!side_in) throw FormatError("cannot read " + side_path.string());
  const json side = json::parse(side_in, nullptr, false);
  if (side.is_discarded() || !side.is_object()) throw FormatError(side_path.string() + ": malformed header");

  int dim = 0, N = 0;
  Index3 res{1, 1, 1};
  std::array<double, 3> period{1, 1, 1};
  try {
    if (side.at("format_version").get<int>() != kFormatVersion) throw FormatError("unsupported format_version");
    if (side.at("byte_order").get<std::string>() != "little" || side.at("scalar").get<std::string>() != "f64" ||
        side.at("layout").get<std::string>() != kLayout)
      throw FormatError("unsupported payload encoding");
    dim = side.at("dim").get<int>();
    N = side.at("codomain").get<int>();
    const json& r = side.at("resolution");
    const json& p = side.at("period");
    if (dim < 1 || dim > 3 || r.size() != static_cast<std::size_t>(dim) || p.size() != static_cast<std::size_t>(dim))
      throw FormatError("dim does not match resolution/period");
    for (int a = 0; a < dim; ++a) {
      res[a] = r[a].get<int>();
      period[a] = p[a].get<double>();
    }
    if (meta) {
      meta->time = side.at("time").get<double>();
      meta->h = side.at("h").get<double>();
      meta->kind = side.at("kind").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw FormatError(side_path.string() + ": malformed header: " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(side_path.string() + ": " + e.what());
  }
  if (N < 1) throw FormatError(side_path.string() + ": codomain must be positive");
  if (expected_codomain && *expected_codomain != N)
    throw FormatError(side_path.string() + ": codomain mismatch, file has N=" + std::to_string(N) + ", expected N=" +
                      std::to_string(*expected_codomain));

  std::optional<TorusGrid> grid;
  try {
    grid.emplace(dim, period, res);
  } catch (const InvalidArgument& e) {
    throw FormatError(side_path.string() + ": " + e.what());
  }

  const auto bin_path = with_suffix(stem, ".bin");
  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + bin_path.string());
  std::vector<unsigned char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t n = grid->size();
  const std::size_t expected = n * static_cast<std::size_t>(N) * 8;
  if (payload.size() != expected)
    throw FormatError(bin_path.string() + ": payload has " + std::to_string(payload.size()) + " bytes, header implies " +
                      std::to_string(expected));

  VectorField u(*grid, N);
  for (std::size_t k = 0; k < n; ++k)
    for (int c = 0; c < N; ++c) {
      unsigned char* src = payload.data() + (k * N + c) * 8;
      to_little(src);
      double v;
      std::memcpy(&v, src, 8);
      if (!std::isfinite(v))
        throw FormatError(bin_path.string() + ": non-finite value at node " + std::to_string(k));
      u.at(k, c) = v;
    }
  return u;
}

void write_record_csv(const RunRecord& r, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "step,time,e_h,e_h_local,dissipation_cum,metric,radius_est,ledger_ok\n";
  for (const auto& row : r.rows)
    out << row.step << ',' << fmt(row.time) << ',' << fmt(row.e_h) << ',' << fmt(row.e_h_local) << ','
        << fmt(row.dissipation_cum) << ',' << fmt(row.metric) << ',' << fmt(row.radius_est) << ','
        << (row.ledger_ok ? "true" : "false") << '\n';
  write_text(path, out.str());
}

std::string record_summary(const RunRecord& r) {
  std::ostringstream out;
  out << "config_hash " << r.config_hash << "\n";
  out << "code_version " << r.code_version << "\n";
  out << "steps " << (r.rows.empty() ? 0 : r.rows.back().step) << "\n";
  if (!r.rows.empty()) {
    out << "e_h initial " << fmt(r.rows.front().e_h) << " final " << fmt(r.rows.back().e_h) << "\n";
    out << "dissipation_cum " << fmt(r.rows.back().dissipation_cum) << "\n";
  }
  out << "[" << (r.ledger_ok ? "PASS" : "FAIL") << "] ledger_ok=" << (r.ledger_ok ? "true" : "false") << "\n";
  for (const auto& row : r.rows)
    if (!row.ledger_ok) out << "  ledger_ok=false at step " << row.step << " excess " << fmt(row.excess) << "\n";
  out << "[" << (r.energy_nonincreasing ? "PASS" : "FAIL") << "] energy_nonincreasing\n";
  if (r.gronwall_max) out << "gronwall_max " << fmt(*r.gronwall_max) << "\n";
  if (r.gronwall_dissipation) out << "gronwall_dissipation " << fmt(*r.gronwall_dissipation) << "\n";
  if (r.el_inner) out << "el_inner " << fmt(*r.el_inner) << "\n";
  if (r.el_outer) out << "el_outer " << fmt(*r.el_outer) << "\n";
  if (r.final_radius) out << "final_radius " << fmt(*r.final_radius) << "\n";
  if (r.kappa_h_ratio) out << "kappa_h_ratio " << fmt(*r.kappa_h_ratio) << "\n";
  if (!r.extractions.empty()) {
    std::size_t failed = 0;
    for (const auto& e : r.extractions) failed += e.ok ? 0 : 1;
    out << "[" << (failed == 0 ? "PASS" : "FAIL") << "] extraction " << r.extractions.size() - failed << "/"
        << r.extractions.size() << " ok\n";
  }
  return out.str();
}

void write_convergence_csv(const ConvergenceTable& t, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "h,steps,radius,radius_reference,radius_sq_error,kappa_h_ratio,gronwall_max,el_inner,el_outer,"
         "extraction_ok\n";
  for (const auto& r : t.rows)
    out << fmt(r.h) << ',' << r.steps << ',' << fmt(r.radius) << ',' << fmt(r.radius_reference) << ','
        << fmt(r.radius_sq_error) << ',' << fmt(r.kappa_h_ratio) << ',' << fmt(r.gronwall_max) << ','
        << fmt(r.el_inner) << ',' << fmt(r.el_outer) << ',' << (r.extraction_ok ? "true" : "false") << '\n';
  write_text(path, out.str());
}

std::string convergence_summary(const ConvergenceTable& t) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %6s %10s %10s %12s %13s %12s\n", "h", "steps", "radius", "reference",
                "R^2 error", "kappa_h_ratio", "gronwall_max");
  out << line;
  for (const auto& r : t.rows) {
    std::snprintf(line, sizeof line, "%-10.3g %6d %10.5f %10.5f %12.4e %13.4f %12.4f\n", r.h, r.steps, r.radius,
                  r.radius_reference, r.radius_sq_error, r.kappa_h_ratio, r.gronwall_max);
    out << line;
  }
  out << "error_slope " << fmt(t.error_slope) << "\n";
  bool err_ok = true, ratio_ok = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    err_ok = err_ok && t.rows[i].radius_sq_error <= t.rows[i - 1].radius_sq_error;
    ratio_ok = ratio_ok && std::abs(t.rows[i].kappa_h_ratio - 1.0) <= std::abs(t.rows[i - 1].kappa_h_ratio - 1.0);
  }
  out << "[" << (err_ok ? "PASS" : "FAIL") << "] radius_sq_error non-increasing\n";
  out << "[" << (ratio_ok ? "PASS" : "FAIL") << "] kappa_h_ratio gap non-increasing\n";
  return out.str();
}

}  // namespace codim2
