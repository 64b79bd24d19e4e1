#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace trevl::cli {

struct CliConfig {
  std::string qrel_path;
  std::string run_path;
  std::vector<std::string> measures;  // raw -m tokens
  bool per_query = false;
  bool complete = false;
  std::size_t depth_cap = 1000;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 2;

/// trec_eval-compatible front end:
///   trevl [-q] [-c] [-M depth] -m <measure> ... <qrel-file> <run-file>
/// With no -m, every supported measure is reported. Results go to `out`,
/// diagnostics to `err`. Returns 0 iff at least one query was evaluated.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trevl::cli
