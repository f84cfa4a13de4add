#pragma once

#include "amlab/config.hpp"

namespace amlab {

// Exit codes shared by the library driver and the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitThresholdFailure = 2,
  kExitCollapse = 3,
};

// Executes one experiment described by the config: writes the canonical
// config, result CSV/JSON artifacts and optional SVG plot into
// config.output_dir, and returns the exit code.
int run(const ExperimentConfig& config);

}  // namespace amlab
