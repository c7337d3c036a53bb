#pragma once

#include <string>
#include <vector>

namespace rcs {

// Command-line front end. Exit codes: 0 success, 1 validation or usage
// error, 2 divergence (a solver blew up or the mu oracle found no usable run).
int cli_main(const std::vector<std::string>& args);

}  // namespace rcs
