// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace motionfield {

/// Command-line entry point. `args` excludes the program name. Returns 0 on
/// success, 2 on usage errors and 1 on any other failure; messages go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace motionfield
