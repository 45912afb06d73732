#pragma once
// Experiment orchestration: trajectory -> constants -> operator matrices ->
// spectra -> certificate -> scan -> inequality ledgers, with every artifact
// indexed by content hash in manifest.json.

#include <filesystem>
#include <iosfwd>

#include "chanlab/config.hpp"

namespace chanlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitNumerical = 3;

// CHANNEL_LAB_OUTPUT_ROOT overrides config.output; the run lands in <root>/<name>.
std::filesystem::path output_directory(const ExperimentConfig& config);

struct RunResult {
  int exit_code = kExitOk;
  std::filesystem::path directory;
  int checks_failed = 0;
};

// Throws ConfigError / PreconditionError for schema problems; numerical
// failures are caught, recorded in the manifest and reported as exit 3.
RunResult run_experiment(const ExperimentConfig& config, std::ostream& log);

// CLI entry points returning exit codes.
int run_command(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int report_command(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);
int verify_command(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

}  // namespace chanlab
