#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dynkin::cli {

enum ExitCode : int {
  kOk = 0,
  kParse = 1,           // bad arguments, unreadable or malformed input
  kValidation = 2,      // payoff assumptions violated
  kNonConvergence = 3,  // scheme did not reach a fixed point in the budget
  kCertification = 4,   // a certificate or audit failed
  kCap = 5,             // enumeration cap exceeded
};

// Runs one command. `args` excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace dynkin::cli
