#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hullkit/io.hpp"

namespace hullkit {

struct CommandOutput {
  json report;    // deterministic for a given config
  json metadata;  // wall-clock data, kept apart from the report
  std::vector<std::filesystem::path> files;
  bool flagged = false;  // numerical non-convergence; files are still written
  std::string summary;   // one line for the terminal
};

/// Runs the configured command and writes `<command>.json`,
/// `<command>.meta.json` and any CSV or artifact files into out_dir.
CommandOutput run_command(const RunConfig& cfg);

/// 0 success, 2 validation, 3 numerical, 4 I/O, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace hullkit
