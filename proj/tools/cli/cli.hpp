#pragma once

#include <string>
#include <vector>

namespace msl::cli {

// Exit codes: 0 success, 2 usage or validation error, 3 any other failure
// (certificate failure after retries, unsupported body, internal budget).
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitFailure = 3;

struct Outcome {
  int exit_code = kExitOk;
  std::string output;  // JSON or CSV document, empty when written to --out
  std::string error;   // error JSON or usage text
};

// Runs one command. args excludes the program name.
Outcome run(const std::vector<std::string>& args);

}  // namespace msl::cli
