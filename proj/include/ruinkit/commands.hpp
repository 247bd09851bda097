#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "ruinkit/config.hpp"

namespace ruinkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Runs describe, ruin, transform, bounds or simulate, writing CSV to `out`
/// and diagnostics to `err`.  Returns the process exit code.
int run_command(const std::string& command, const RunConfig& config, std::ostream& out, std::ostream& err);

/// Loads the config file, applies the --out and --seed overrides and runs
/// the command.  Output goes to the override path, then command.out, then `out`.
int execute(const std::string& command, const std::string& config_path, const std::optional<std::string>& out_path,
            std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

}  // namespace ruinkit
