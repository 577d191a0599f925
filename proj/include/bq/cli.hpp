#pragma once

// Command-line front end: flat key=value configuration, subcommand dispatch,
// deterministic seeding and file emission.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace bq::cli {

enum ExitCode : int { kOk = 0, kValidationError = 2, kNumericalError = 3 };

struct RunConfig {
  std::string subcommand;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = ".";
  std::map<std::string, std::string> parameters;
};

std::vector<std::string> subcommands();

/// Accepted keys with their defaults, in declaration order.
std::vector<std::pair<std::string, std::string>> defaults(const std::string& subcommand);

/// Lines of key=value; blank lines and '#' comments ignored. The key `seed`
/// is accepted and moved into `seed` by the caller.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

/// Runs one subcommand. Outputs are produced in memory and written only on
/// success, each through a temporary file, with manifest.json last.
int run(const RunConfig& config, std::ostream& err);

/// argv front end: bq <subcommand> [--config F] [--seed N] [--out DIR] [key=value ...].
int main_entry(int argc, char** argv);

}  // namespace bq::cli
