#pragma once

#include <optional>
#include <string>

namespace nisio::cli {

enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kSchemaError = 2, kNumericalDegeneracy = 3 };

struct Options {
    std::string subcommand;
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

/// Runs solve, properties, dpp, control, mc or report. Errors are reported
/// on stderr and mapped to exit codes; nothing is written when the config
/// fails validation.
int run(const Options& options);

/// Thread count from --threads, else NISIO_THREADS, else the OpenMP default.
std::optional<int> resolve_threads(std::optional<int> flag);

}  // namespace nisio::cli
