#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mospline/model_io.hpp"

namespace mospline {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInvalidInput = 2,
  kExitEvaluation = 3,
};

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out`; errors go to `err` as one line of JSON.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Loads a model from a file path or from "fixture:<name>[?k=v&...]".
ModelDocument load_model_source(const std::string& source);

/// Applies MOSPLINE_LOG (error|warn|info|debug) to the process logger.
void configure_logging_from_env();

}  // namespace mospline
