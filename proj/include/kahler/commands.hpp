#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "kahler/config.hpp"

namespace kahler {

// Report of one CLI command. "pass" is false iff a declared invariant failed.
struct CommandResult {
  nlohmann::ordered_json report;
  bool pass = true;
  std::vector<std::string> files;  // written below cfg.out_dir
};

const std::vector<std::string>& command_names();
// Runs a subcommand. Writes its report and field/CSV files into cfg.out_dir when
// write_files is set. Throws InvalidInput (ConfigError) for unusable configurations.
CommandResult run_command(const std::string& name, const ExperimentConfig& cfg, bool write_files = true);

}  // namespace kahler
