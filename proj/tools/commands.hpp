#ifndef BLOCHDECK_TOOLS_COMMANDS_HPP
#define BLOCHDECK_TOOLS_COMMANDS_HPP

#include "config.hpp"
#include "report.hpp"

namespace blochdeck::cli {

// Command implementations. Each runs its check battery, writes the report and
// any data files under outdir, and returns the in-memory report. Validation
// failures surface as std::invalid_argument / std::domain_error before any
// files are written; eigensolver breakdowns as std::runtime_error.
Report cmd_check_harmonic(const RunConfig& cfg, const std::string& outdir);
Report cmd_bloch(const RunConfig& cfg, const std::string& outdir);
Report cmd_schulman(const RunConfig& cfg, const std::string& outdir);

// Dispatch on cfg.task().command.
Report run_command(const RunConfig& cfg, const std::string& outdir);

}  // namespace blochdeck::cli

#endif
