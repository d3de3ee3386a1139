#ifndef WALKCAST_CLI_HPP
#define WALKCAST_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "walkcast/backtest.hpp"
#include "walkcast/dataio.hpp"

namespace walkcast::cli {

// Fully resolved run settings: config-file values with command-line flags
// applied on top (flags win). Date defaults are the historical study window;
// they only matter when the loaded CSV actually covers it.
struct RunConfig {
  std::string data_path;
  dataio::Date train_start{2014, 12, 29};
  dataio::Date train_end{2018, 12, 28};
  dataio::Date test_start{2018, 12, 31};
  dataio::Date test_end{2020, 7, 31};
  std::string model = "lstm1";
  int rounds = 1;
  std::uint64_t seed = 42;
  int lag = 1;                    // classical Case II: 0 = same-day inputs
  bool retrain_each_week = false;
  bool paper_mode = false;        // forces lag = 0
  bool emit_timing = false;       // measured times make reports nondeterministic
  std::optional<int> epochs;
  std::optional<int> batch;
  std::optional<double> lr;
  backtest::ParamGrid grid;       // empty outside `gridsearch`
  std::string output_dir = ".";

  void validate() const;  // throws ConfigError on bad field combinations
};

// Parses the flat key=value format (# comments, optional [grid] section of
// `param = v1, v2, ...` lines). Unknown keys are rejected.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});

// Canonical key=value rendering of everything that affects results. Paths are
// excluded so the digest survives moving data or output directories around.
std::string canonical_config(const RunConfig& config);

// FNV-1a 64 over canonical_config, as 16 hex digits.
std::string config_digest(const RunConfig& config);

// Worker count for round-level parallelism: WALKCAST_THREADS if set
// (0 = sequential), otherwise hardware concurrency, never above `rounds`.
std::size_t resolve_threads(int rounds);

// Entry point shared by main() and the in-process CLI tests. `args` excludes
// the program name. Returns the process exit code: 0 ok, 2 config/validation,
// 3 numerical divergence, 4 I/O.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace walkcast::cli

#endif  // WALKCAST_CLI_HPP
