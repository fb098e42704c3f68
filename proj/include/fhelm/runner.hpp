#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fhelm/config.hpp"

namespace fhelm {

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides output.dir
  std::optional<std::uint64_t> seed;             // overrides solver.seed
  bool verbose = false;
};

struct RunOutcome {
  int exit_code = 0;  // 0 pass, 1 scientific-check failure, 2 configuration error
  std::string message;
  nlohmann::json summary;
  std::vector<std::filesystem::path> artifacts;
};

// Runs one experiment and writes its artifacts. Never throws for library
// errors; they are mapped onto exit codes.
RunOutcome run(RunConfig config, const RunOptions& opts = {});

}  // namespace fhelm
