#pragma once

#include <ostream>
#include <string>

#include "qbf/types.hpp"

namespace qbf {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitStructure = 4,
  kExitNumeric = 5,
  kExitBadRange = 6,
  kExitWrongRegime = 7,
};

int exit_code_for(ErrorCode code);

/// Inclusive grid min + (max - min) k / (steps - 1), k = 0 .. steps - 1.
struct Grid {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;
  double at(int k) const;
};

/// "min:max:steps", or a single number for a one-point grid.
/// Throws BadRange on min >= max or steps < 2, ParseError on bad syntax.
Grid parse_grid(const std::string& text);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qbf
