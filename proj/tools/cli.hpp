#pragma once

// The tj command line. Exit codes: 0 success, 1 error-severity findings
// (validate, schema-validate), 2 usage, I/O or format errors.

#include <ostream>

namespace tj::cli {

inline constexpr int kOk = 0;
inline constexpr int kFindings = 1;
inline constexpr int kFailure = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tj::cli
