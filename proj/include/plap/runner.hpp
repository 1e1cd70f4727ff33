#pragma once

// Runs an experiment config end to end: computes, writes artifacts and a
// manifest, and maps the outcome to a process exit status.

#include "plap/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace plap {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 2;
inline constexpr int solver_failure = 3;
inline constexpr int blowup = 4;
inline constexpr int verification_failure = 5;
}  // namespace exit_code

struct RunOverrides {
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> only;
};

/// Executes `cfg`; `config_text` is hashed into the manifest. Errors are
/// reported on `log` and mapped to exit codes rather than thrown.
int run_experiment(ExperimentConfig cfg, const std::string& config_text, const RunOverrides& overrides,
                   std::ostream& log);

/// Loads the config at `path` (or uses defaults for `verify` when empty) and runs it.
/// A non-empty `expected_kind` must match the config's kind.
int run_config_file(const std::string& path, const std::string& expected_kind, const RunOverrides& overrides,
                    std::ostream& log);

}  // namespace plap
