#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coherent::cli {

/// Exit codes: 0 success, 1 usage error, 2 verification or tightness
/// failure, 3 solver failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace coherent::cli
