#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace momt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;

// Runs one invocation; args[0] is the program name. Reports and diagnostics
// go to `out`/`err` unless --out redirects them to a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Worker count for batch runs: MOMT_THREADS if set, else hardware threads.
unsigned worker_count();

// Parses "1,2,3" into integers; throws Error(kInvalidArgument).
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace momt::cli
