#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace faqir::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 2, kDataError = 3 };

// Runs one command line (args[0] is the program name). Human-readable
// summaries go to `out`, or JSON when --json is given; errors go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace faqir::cli
