#pragma once

#include "cli_config.hpp"

#include <iosfwd>

namespace impactkit::cli {

// Exit codes: 0 success, 2 config error, 3 numerical error, 4 verification failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitVerifyFailed = 4;

int cmd_impact(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_figure(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Dispatch on config.command with error -> exit-code mapping.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace impactkit::cli
