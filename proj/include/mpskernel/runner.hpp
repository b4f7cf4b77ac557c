#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mpsk {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericError = 3;

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed_override;  // replaces params.seed
  int threads = 1;
};

/// Schema and cross-field checks on a raw run config. Returns diagnostics;
/// an empty list means the config is valid.
std::vector<std::string> validate_config(const nlohmann::json& config);

/// Executes the configured task and writes its artifacts (a JSON report
/// with the resolved config, seeds and an isolated timing section, plus
/// task CSVs) under out_dir. Returns an exit code; diagnostics go to
/// stderr. Deterministic given the config and seeds, timing fields aside.
int run_config(const nlohmann::json& config, const RunOptions& options);

}  // namespace mpsk
