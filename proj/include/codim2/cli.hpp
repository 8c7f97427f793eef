#pragma once

#include <filesystem>
#include <ostream>

#include "codim2/harness.hpp"

namespace codim2 {

/// Exit codes: 0 success, 1 validation error or bad usage, 2 runtime or
/// ledger failure (including failed check suites).
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes `<stem>.csv` and the human-readable `<stem>.txt` summary.
void emit_report(const RunRecord& record, const std::filesystem::path& stem);
void emit_report(const ConvergenceTable& table, const std::filesystem::path& stem);

}  // namespace codim2
