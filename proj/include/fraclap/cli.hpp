#pragma once

#include <string>
#include <vector>

namespace fraclap {

// Batch front door: solve | extend | verify | cover | report.
// Returns the process exit code: 0 success, 2 configuration/schema error,
// 3 solver failure, 4 quadrature tolerance not met, 5 divergence flagged.
int run_cli(const std::vector<std::string>& args);

}  // namespace fraclap
