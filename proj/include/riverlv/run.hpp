#pragma once

#include "riverlv/config.hpp"

#include <exception>
#include <string>

namespace riverlv {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_anomaly = 4 };

// Executes the configured pipeline and writes the bundle into config.out_dir.
// Errors propagate as exceptions; returns exit_anomaly when the sweep gate trips.
int run(const RunConfig& config);

// Maps an in-flight exception to an exit code and a JSON error record.
int describe_error(std::exception_ptr error, std::string& record);

}  // namespace riverlv
