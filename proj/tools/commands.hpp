#pragma once

// Subcommands of the ssdm tool. Each returns the process exit status:
// 0 success, 1 usage or I/O error, 2 infeasible, 3 budget exhausted,
// 4 bisection failed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace ssdm::cli {

enum ExitCode : int { kOk = 0, kError = 1, kInfeasible = 2, kExhausted = 3, kFailed = 4 };

struct RunConfig {
  std::string command;
  std::filesystem::path instance;
  std::filesystem::path decision;  // validate
  double epsilon = 0.05;
  double delta = 0.01;
  double rho = 0.1;
  double kappa = 0.05;
  std::string engine = "bl";         // bl | ellipsoid
  std::string schedule = "adaptive"; // fixed | adaptive
  std::string rules = "constant";    // constant | demand (inventory only)
  std::optional<std::size_t> budget;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  unsigned threads = 1;
  std::filesystem::path out_dir = ".";

  /// Throws std::invalid_argument.
  void validate() const;
};

int cmd_solve(const RunConfig& config);
int cmd_minimize(const RunConfig& config);
int cmd_validate(const RunConfig& config);
/// Writes the default inventory instance, minimizes its total budget and
/// validates the result.
int cmd_demo_inventory(const RunConfig& config);

/// Dispatches on config.command, turning exceptions into exit status 1.
int dispatch(const RunConfig& config);

}  // namespace ssdm::cli
