#pragma once
// Command-line front end. Exit codes: 0 definitive, 2 Undetermined, 1 input or usage error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "omaxcones/serialize.hpp"

namespace omaxcones::cli {

struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::optional<int> restarts;
  std::optional<int> iterations;
  std::string output;  // empty: stdout
  std::string format = "json";
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUndetermined = 2;

struct JobResult {
  int exit_code = kExitOk;
  io::Json output;
  std::string error;  // set when exit_code == kExitError
};

/// Runs one subcommand on parsed input. `options` carries per-command settings
/// ("kind" for norm, "dagger" for flat, "quick" for selftest, "n"/"m"/"samples" for dual-verify).
JobResult run_command(const std::string& command, const io::Json& input, const io::Json& options,
                      const RunConfig& cfg);

/// Jobs {"command", "input", "options"?} run on a worker pool; results keep manifest order.
io::Json run_batch(const io::Json& manifest, const RunConfig& cfg, std::size_t threads);

/// OMAXCONES_THREADS if set and positive, else the hardware concurrency (at least 1).
std::size_t worker_threads();

/// Re-checks an emitted certificate file by direct evaluation only.
io::Json verify_emitted(const io::Json& emitted);

/// Plain-text rendering of a result object.
std::string render_text(const io::Json& j);

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace omaxcones::cli
