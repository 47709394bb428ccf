#pragma once

// Subcommand dispatch shared by the thickobs executable and the tests.
// Every subcommand reads one JSON config, writes its reports into the output
// directory via temp-file rename, and echoes the effective config (seed
// included) as config.json so a rerun reproduces the outputs byte for byte.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thickobs/serialization.hpp"

namespace thickobs {

enum ExitCode : int {
  kExitOk = 0,
  kExitDomain = 2,
  kExitSingularGramian = 3,
  kExitUnreliableTruncation = 4,
  kExitInternal = 5,
};

struct RunOptions
{
  std::string subcommand;
  Json config = Json::object();
  std::optional<std::filesystem::path> config_path;  // loaded into config when set
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;  // overrides config["seed"]
  int threads = 0;                    // 0: hardware concurrency
};

const std::vector<std::string>& subcommands();

/// Parses a JSON file; DomainError on I/O or syntax errors.
Json load_config(const std::filesystem::path& path);

/// Runs one subcommand. Errors are mapped to exit codes and described in
/// <out>/error.json; nothing escapes.
int run_command(const RunOptions& opts);

}  // namespace thickobs
