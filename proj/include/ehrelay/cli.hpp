#pragma once

#include <ostream>
#include <string>

#include "ehrelay/config_io.hpp"

namespace ehrelay {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

/// Entry point of the `ehrelay` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Derived quantities echoed by `validate` and stored in run manifests.
std::string derived_report_json(const RunConfig& cfg);

}  // namespace ehrelay
