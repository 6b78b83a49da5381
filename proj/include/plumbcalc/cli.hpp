#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plumbcalc {

// Full command-line entry point, usable in-process by tests. Exit codes:
// 0 success, 2 parse/validation/hypothesis/bad parameters, 3 not negative
// definite, 4 capacity, 5 a failed exactness check, 1 anything unexpected.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version_string();

}  // namespace plumbcalc
