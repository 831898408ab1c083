#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trsat::cli {

/// Exit codes: 0 positive result, 1 negative result, 2 usage or input error.
constexpr int kPositive = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;

/// Runs the trsat command line. JSON goes to `out`, human summaries to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "te.json" -> "te.sidecar.json"; other names get ".sidecar.json" appended.
std::string sidecar_path(const std::string& te_path);

}  // namespace trsat::cli
