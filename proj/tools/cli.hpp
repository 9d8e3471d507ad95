#pragma once

// Command-line front end. run() is the whole program; main() forwards to it.

#include <iosfwd>
#include <vector>
#include <string>

namespace ssqm::cli {

enum Exit { kOk = 0, kUsage = 1, kFailure = 2, kNumeric = 3 };

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssqm::cli
