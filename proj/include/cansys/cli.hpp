#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cansys {

/// Exit codes: 0 success, 2 input error, 3 verification or classification
/// failure, 4 numerical inconclusiveness.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cansys
