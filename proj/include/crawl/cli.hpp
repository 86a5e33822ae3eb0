#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace crawl::cli {

struct RunOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> horizon;
    std::int64_t replications = 1;
};

/// Runs the experiment in `config_path`, writes trace.csv and summary.json
/// under the output directory, prints a one-line result. With replications
/// R > 1 (stochastic only) runs seeds seed..seed+R-1 in parallel, writes
/// per-replication files plus a merged replications.json.
int cmd_run(const std::string& config_path, const RunOverrides& overrides);

/// Prints eta and gamma for a source at state x or lattice step k.
/// `source_id` is 1-based.
int cmd_index(const std::string& config_path, std::int64_t source_id,
              std::optional<double> x, std::optional<std::int64_t> k);

struct VerifyOverrides {
    std::optional<double> index_tol;
    std::optional<std::int64_t> sweep_points;
    std::optional<double> delta;
    std::optional<std::int64_t> grid_n;
};

/// Runs the verification battery on the config's fleet and prints one
/// pass/fail line per check. Returns 0 iff everything passes.
int cmd_verify(const std::string& config_path, const VerifyOverrides& overrides);

/// CLI entry point (subcommands: run, index, verify).
int main(int argc, char** argv);

}  // namespace crawl::cli
