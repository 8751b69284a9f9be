#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace latticeforge::cli {

// Exit codes: 0 success, 1 unexpected failure, 2 configuration or usage error, 3 capacity error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace latticeforge::cli
