#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kym {

enum ExitCode { exit_pass = 0, exit_input = 2, exit_numerical = 3 };

struct RunDescriptor {
  std::string command;
  std::string input;
  std::string out;  // empty: stdout only
  std::optional<double> tol;
  unsigned long seed = 0;
  std::optional<std::string> alpha;  // double for continuation, "p/q" for stability
  std::optional<double> beta;
};

int cmd_instanton_check(const RunDescriptor& d, std::ostream& out);
int cmd_continuation(const RunDescriptor& d, std::ostream& out);
int cmd_stability(const RunDescriptor& d, std::ostream& out);
int cmd_futaki(const RunDescriptor& d, std::ostream& out);
int cmd_laplacian_probe(const RunDescriptor& d, std::ostream& out);

// parses argv, dispatches, maps errors to exit codes
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kym
