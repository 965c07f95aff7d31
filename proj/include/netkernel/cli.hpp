#pragma once

#include <optional>
#include <string>

namespace netkernel {
namespace cli {

// Executes one named experiment from a JSON config and writes its artifacts
// (trajectory files, CSV tables, JSON summaries) under out_dir. Returns the
// process exit code: 0 ok, 2 config error, 3 data error, 4 numerical error.
// Errors are reported as one-line JSON records on stderr.
int run(const std::string& subcommand, const std::string& config_path,
        const std::string& out_dir, std::optional<int> threads,
        std::optional<std::uint64_t> seed_override);

}  // namespace cli
}  // namespace netkernel
