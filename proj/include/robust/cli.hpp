#pragma once

// robust-hjbi command line. Subcommands: validate, solve, strategy, simulate,
// verify, oracle, convergence.
//
// Exit codes: 0 success, 1 assumption or assertion failure, 2 config error,
// 3 missing or stale prerequisite artifact.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

namespace robust {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPrerequisite = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputEnv = "ROBUST_HJBI_OUT";

struct CliOptions {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> paths;
  std::optional<std::pair<int, int>> grid;  // n_t, n_y
  bool dump_config = false;

  // oracle
  std::optional<double> b_val;
  std::optional<double> kappa;
  std::optional<std::string> rect;  // "mu-,mu+,sigma-,sigma+"
  int resolution = 500;

  // simulate
  int histogram_bins = 0;

  // convergence
  int levels = 2;
};

int run_command(const CliOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to run_command.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace robust
