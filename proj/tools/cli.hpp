#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace riccap::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNotConverged = 3 };

struct RunConfig {
  std::string subcommand;  // check-system, solve-are, capacity-n, ...
  std::string model_path;
  std::size_t n = 0;  // capacity-n horizon
  double tol = 1e-11;
  std::size_t max_iter = 1'000'000;
  std::uint64_t seed = 0x5eed;
  std::size_t starts = 32;
  std::vector<double> kappa;  // overrides the channel budget; a grid for sweep-kappa
  std::string units = "nats";
  std::string out;        // result file; stdout when empty
  std::string trace_out;  // CSV trace (capacity-n) or per-path traces (simulate)
  bool strict = false;
  std::string which = "noise";  // solve-are: noise | augmented
  long state_dim = 1;           // optimize, sweep-kappa
  long noise_dim = 1;
  std::size_t paths = 10'000;  // simulate
  std::size_t horizon = 50;
};

/// Executes one subcommand. Results go to config.out (or `out`), messages to
/// `err`. Returns an ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses the command line into a RunConfig and runs it. Parse errors exit 2.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace riccap::cli
