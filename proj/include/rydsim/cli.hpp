#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace rydsim {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kOutputDirEnvVar = "RYDSIM_OUTPUT_DIR";

// Loads a config file and validates it against the published schema: the
// schema_version must match, every key must be known (unknown keys are
// rejected with the offending field path), and the experiment name must be
// one of the supported schemes. Throws ConfigurationError.
nlohmann::json load_config(const std::filesystem::path& path);
void validate_config(const nlohmann::json& config,
                     const std::string& config_name = "config");

// FNV-1a (64-bit) over the canonical serialized config; written into every
// result-file header so outputs are traceable to their inputs.
std::uint64_t config_hash(const nlohmann::json& config);

// Output directory resolution: explicit flag, else the RYDSIM_OUTPUT_DIR
// environment variable, else the current directory.
std::filesystem::path resolve_output_dir(const std::string& flag_value);

struct CliOptions {
  std::filesystem::path config_path;
  std::string output_dir;       // empty = env var / cwd
  std::int64_t seed = -1;       // -1 = use the config's sampling.seed
  int threads = 0;              // 0 = all cores
  int verbosity = 0;
};

// Subcommand drivers; each returns the process exit code (0 success,
// 2 configuration error, 3 integration error, 4 orthogonal drive).
int cmd_run(const CliOptions& options);
int cmd_sweep(const CliOptions& options);
int cmd_validate(const CliOptions& options);

// Full command-line entry point (flag parsing + dispatch + error mapping).
int cli_main(int argc, char** argv);

}  // namespace rydsim
