#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "codim2/cli.hpp"
#include "doctest.h"

using namespace codim2;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "codim2");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "codim2_test_cli";
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

const char* kSmall = R"({
  "resolution": [16, 16, 16],
  "sigma": 0.3,
  "h": 0.001,
  "steps": 2,
  "initial": {"kind": "plane_wave", "axis": 0},
  "diagnostics": {"extraction_every": 0}
})";

}  // namespace

TEST_CASE("help and usage errors") {
  const auto help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("converge") != std::string::npos);
  CHECK(help.out.find("\"variant\"") != std::string::npos);
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"run"}).code == 1);
  CHECK(invoke({"run", "--config", "x.json", "--bogus"}).code == 1);
  CHECK(invoke({"teleport"}).code == 1);
  CHECK(invoke({"check", "--suite", "nope"}).code == 1);
  CHECK(invoke({"converge", "--help"}).code == 0);
}

TEST_CASE("init writes a template that parses") {
  const auto dir = scratch_dir();
  const auto printed = invoke({"init"});
  CHECK(printed.code == 0);
  CHECK(printed.out.find("\"kind\": \"circle\"") != std::string::npos);
  CHECK(invoke({"init", "--out", (dir / "t.json").string()}).code == 0);
  CHECK(fs::exists(dir / "t.json"));
  const auto r = invoke({"energy", "--config", (dir / "t.json").string(), "--set", "resolution=[16,16,16]", "--set",
                         "sigma=0.3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("e_h_localized") != std::string::npos);
}

TEST_CASE("run, energy and validation exit codes") {
  const auto dir = scratch_dir();
  write(dir / "small.json", kSmall);
  const auto cfg = (dir / "small.json").string();

  const auto ok = invoke({"run", "--config", cfg, "--out", (dir / "out").string()});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("[PASS] ledger_ok=true") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "record.csv"));
  CHECK(fs::exists(dir / "out" / "u_000002.json"));

  const auto en = invoke({"energy", "--config", cfg, "--field", (dir / "out" / "u_000002").string()});
  CHECK(en.code == 0);
  CHECK(en.out.find("e_h ") != std::string::npos);

  CHECK(invoke({"run", "--config", (dir / "missing.json").string()}).code == 1);
  CHECK(invoke({"run", "--config", cfg, "--set", "codomain=3"}).code == 1);
  CHECK(invoke({"run", "--config", cfg, "--set", "unknown=1"}).code == 1);
  CHECK(invoke({"energy", "--config", cfg, "--field", (dir / "nothing").string()}).code == 1);
  CHECK(invoke({"converge", "--config", cfg, "--h", "1e-3,abc,1e-4"}).code == 1);
  CHECK(invoke({"converge", "--config", cfg, "--h", "4e-4,2e-4,1e-4"}).code == 1);
}

TEST_CASE("check suite exit code") {
  const auto r = invoke({"check", "--suite", "identities"});
  CHECK(r.code == 0);
  CHECK(r.out.find("[FAIL]") == std::string::npos);
  CHECK(r.out.find("[PASS]") != std::string::npos);
}
