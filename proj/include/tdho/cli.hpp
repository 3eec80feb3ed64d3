#pragma once

// Config-driven front end. `run_cli` is the whole program minus process
// plumbing so it can be driven in-process.
//
// Exit status: 0 ok, 1 other failure, 2 config or usage error,
// 3 domain/positivity error, 4 a verify check above its threshold.

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace tdho {

/// Named tolerances with their defaults; overridable per run.
std::map<std::string, double> default_tolerances();

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tdho
