#pragma once

#include <string>
#include <vector>

namespace relmatch {

inline constexpr const char* kVersion = "0.2.0";

// Entry point shared by the binary and the tests. Returns the process exit
// code: 0 success, 1 verification failure, 2 configuration error,
// 3 unsupported analytic case.
int run_cli(const std::vector<std::string>& args);

}  // namespace relmatch
