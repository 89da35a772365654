#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blindid/recovery.hpp"
#include "blindid/scenario.hpp"

namespace blindid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitIo = 3;

/// Parse or validation failure carrying the process exit code.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

struct RunConfig {
  std::string subcommand;
  std::string kind = "subspace";
  std::optional<int> n;
  std::optional<int> m1;
  std::optional<int> m2;
  std::optional<int> s1;
  std::optional<int> s2;
  std::uint64_t seed = 0;
  std::string output;    ///< empty: stdout
  std::string manifest;  ///< run-manifest path for sweeps; empty: none
  std::string format;    ///< csv | json; empty: subcommand default
  std::string input;     ///< instance document for `recover`
  std::string ensemble = "complex_generic";
  std::optional<double> R;
  int trials = 100;
  int restarts = 20;
  double noise = 0.0;
  std::vector<double> sweep;
  std::string mode = "single_point";
  unsigned threads = 1;
  double delta = 0.1;
  double epsilon = 1.0;
  double rho = 0.1;
  double ell = 1.0;
  double L = 1.0;
  double sigma = 1.0;
  int budget = 50;
  double tol = 1e-8;
  std::string strength = "weak";
  std::string matrix = "random";
  bool allow_undersampled = false;
  SolverOptions solver;
};

/// Parses argv (without the program name). Values come from, in decreasing
/// priority: flags, BLINDID_SEED (seed only), the --config key=value file,
/// defaults. Unknown keys are rejected. `env_seed` stands in for the
/// environment variable.
RunConfig parse_config(const std::vector<std::string>& args,
                       std::optional<std::string> env_seed = std::nullopt);

/// Builds and validates the scenario named by the config.
ConstraintScenario scenario_from_config(const RunConfig& config);

/// Writes `text` to `path`, or to `fallback` when path is empty.
/// Throws IoError when the file cannot be written.
void emit_report(std::string_view text, const std::string& path, std::ostream& fallback);

/// Runs one subcommand and returns the exit code; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::optional<std::string> env_seed = std::nullopt);

}  // namespace blindid::cli
