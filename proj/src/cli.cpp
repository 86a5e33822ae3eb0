#include "crawl/cli.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crawl/config.hpp"
#include "crawl/dp_oracle.hpp"
#include "crawl/sim.hpp"
#include "crawl/trace_io.hpp"
#include "crawl/verify.hpp"
#include "crawl/version.hpp"
#include "crawl/whittle.hpp"

namespace crawl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_json(const fs::path& path, const json& j) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + path.string());
    file << j.dump(2) << '\n';
    if (!file) throw std::runtime_error("failed writing " + path.string());
}

json full_summary_json(const Summary& summary, const ExperimentConfig& config) {
    json j = summary_to_json(summary);
    j["config"] = to_json(config);
    j["tool_version"] = kVersion;
    return j;
}

std::string describe(const Summary& summary) {
    std::ostringstream os;
    os.precision(10);
    os << "average_reward=" << summary.average_reward
       << " average_cost=" << summary.average_cost << " cycle=";
    if (summary.cycle.has_value())
        os << summary.cycle->period;
    else
        os << "none";
    return os.str();
}

ExperimentConfig load_with_overrides(const std::string& config_path,
                                     const RunOverrides& overrides) {
    ExperimentConfig config = load_config(config_path);
    if (overrides.seed.has_value()) config.seed = overrides.seed;
    if (overrides.horizon.has_value()) {
        config.horizon = *overrides.horizon;
        if (config.warmup.has_value() && *config.warmup >= config.horizon)
            config.warmup = config.horizon / 10;
    }
    if (overrides.out_dir.has_value()) config.out_dir = overrides.out_dir;
    return config;
}

int run_single(const ExperimentConfig& config, const fs::path& out) {
    const RunResult result = run(config.fleet(), config.policy, config.run_spec());
    fs::create_directories(out);
    write_trace_csv(out / "trace.csv", result.trace);
    write_json(out / "summary.json", full_summary_json(result.summary, config));
    std::cout << describe(result.summary) << '\n';
    return 0;
}

int run_replicated(const ExperimentConfig& config, const fs::path& out, std::int64_t reps) {
    if (config.mode != SimMode::Stochastic)
        throw std::runtime_error("replications require stochastic mode");
    fs::create_directories(out);
    const FleetParams fleet = config.fleet();
    std::vector<Summary> summaries(reps);
    std::vector<Trace> traces(reps);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < reps; ++r) {
        ExperimentConfig local = config;
        local.seed = *config.seed + static_cast<std::uint64_t>(r);
        RunResult result = run(fleet, local.policy, local.run_spec());
        summaries[r] = std::move(result.summary);
        traces[r] = std::move(result.trace);
    }

    json merged = json::array();
    double mean = 0.0;
    for (std::int64_t r = 0; r < reps; ++r) {
        char tag[16];
        std::snprintf(tag, sizeof(tag), "%03lld", static_cast<long long>(r));
        ExperimentConfig local = config;
        local.seed = *config.seed + static_cast<std::uint64_t>(r);
        write_trace_csv(out / ("trace_" + std::string(tag) + ".csv"), traces[r]);
        write_json(out / ("summary_" + std::string(tag) + ".json"),
                   full_summary_json(summaries[r], local));
        merged.push_back({{"replication", r},
                          {"seed", *local.seed},
                          {"average_reward", summaries[r].average_reward},
                          {"average_cost", summaries[r].average_cost}});
        mean += summaries[r].average_reward;
    }
    mean /= static_cast<double>(reps);
    double var = 0.0;
    for (const Summary& s : summaries) var += (s.average_reward - mean) * (s.average_reward - mean);
    var /= std::max<double>(1.0, static_cast<double>(reps - 1));
    write_json(out / "replications.json",
               json{{"replications", merged},
                    {"mean_average_reward", mean},
                    {"stddev_average_reward", std::sqrt(var)},
                    {"tool_version", kVersion}});
    std::cout << "replications=" << reps << " mean_average_reward=" << mean << '\n';
    return 0;
}

}  // namespace

int cmd_run(const std::string& config_path, const RunOverrides& overrides) {
    try {
        const ExperimentConfig config = load_with_overrides(config_path, overrides);
        const fs::path out = config.out_dir.value_or("out");
        if (overrides.replications > 1) return run_replicated(config, out, overrides.replications);
        return run_single(config, out);
    } catch (const std::exception& e) {
        std::cerr << "crawlsim run: " << e.what() << '\n';
        return 1;
    }
}

int cmd_index(const std::string& config_path, std::int64_t source_id, std::optional<double> x,
              std::optional<std::int64_t> k) {
    try {
        const ExperimentConfig config = load_config(config_path);
        const FleetParams fleet = config.fleet();
        if (source_id < 1 || source_id > static_cast<std::int64_t>(fleet.size()))
            throw std::runtime_error("source id " + std::to_string(source_id) +
                                     " out of range 1.." + std::to_string(fleet.size()));
        if (x.has_value() == k.has_value())
            throw std::runtime_error("give exactly one of --x or --k");
        const SourceParams& p = fleet.sources[source_id - 1];
        const double state = x.has_value() ? *x : lattice_state(*k, p);
        std::cout.precision(12);
        std::cout << "source " << source_id << " x=" << state << " eta=" << eta(state, p)
                  << " gamma=" << whittle_index(state, p) << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "crawlsim index: " << e.what() << '\n';
        return 1;
    }
}

int cmd_verify(const std::string& config_path, const VerifyOverrides& overrides) {
    try {
        const ExperimentConfig config = load_config(config_path);
        VerifyTolerances tol;
        if (overrides.index_tol.has_value()) tol.index_agreement = *overrides.index_tol;
        if (overrides.sweep_points.has_value()) tol.sweep_points = *overrides.sweep_points;
        if (overrides.delta.has_value()) tol.delta = *overrides.delta;
        if (overrides.grid_n.has_value()) tol.grid_n = *overrides.grid_n;

        const auto results = run_verification(config.fleet(), tol);
        bool all_pass = true;
        for (const CheckResult& r : results) {
            std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.where << '\n';
            all_pass = all_pass && r.pass;
        }
        if (!all_pass) {
            for (const CheckResult& r : results)
                if (!r.pass) {
                    std::cerr << "crawlsim verify: FAILED " << r.name << " (" << r.where << ")\n";
                    break;
                }
            return 1;
        }
        std::cout << "all checks passed\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "crawlsim verify: " << e.what() << '\n';
        return 1;
    }
}

int main(int argc, char** argv) {
    CLI::App app{"Whittle-index crawl scheduler and simulator"};
    app.require_subcommand(1);

    std::string config_path;
    RunOverrides run_overrides;
    auto* run_cmd = app.add_subcommand("run", "simulate an experiment config");
    run_cmd->add_option("config", config_path, "JSON experiment config")->required();
    run_cmd->add_option("--out", run_overrides.out_dir, "output directory");
    run_cmd->add_option("--seed", run_overrides.seed, "override the config seed");
    run_cmd->add_option("--horizon", run_overrides.horizon, "override the horizon");
    run_cmd->add_option("--replications", run_overrides.replications,
                        "independent stochastic replications");

    std::int64_t source_id = 1;
    std::optional<double> x;
    std::optional<std::int64_t> k;
    auto* index_cmd = app.add_subcommand("index", "print eta and gamma for one source");
    index_cmd->add_option("config", config_path, "JSON experiment config")->required();
    index_cmd->add_option("--source", source_id, "1-based source id")->required();
    index_cmd->add_option("--x", x, "state to evaluate");
    index_cmd->add_option("--k", k, "lattice step to evaluate");

    VerifyOverrides verify_overrides;
    auto* verify_cmd = app.add_subcommand("verify", "run the verification battery");
    verify_cmd->add_option("config", config_path, "JSON experiment config")->required();
    verify_cmd->add_option("--tol-index", verify_overrides.index_tol,
                           "index agreement tolerance (default 1e-6)");
    verify_cmd->add_option("--sweep-points", verify_overrides.sweep_points,
                           "lambdas per sweep (default 50)");
    verify_cmd->add_option("--delta", verify_overrides.delta,
                           "discount for value checks (default 0.99)");
    verify_cmd->add_option("--grid", verify_overrides.grid_n, "grid points (default 2001)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (run_cmd->parsed()) return cmd_run(config_path, run_overrides);
    if (index_cmd->parsed()) return cmd_index(config_path, source_id, x, k);
    if (verify_cmd->parsed()) return cmd_verify(config_path, verify_overrides);
    return 1;
}

}  // namespace crawl::cli
