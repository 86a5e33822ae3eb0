#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crawl/model.hpp"
#include "crawl/policy.hpp"
#include "crawl/sim.hpp"

namespace crawl {

struct SourceConfig {
    double lambda_rate = 0.0;
    double xi_mean = 0.0;
    double mu = 0.0;
    double cost = 1.0;
    std::optional<double> x0;
};

/// One experiment: a fleet, a policy and the simulation settings.
/// Parsing is strict: unknown keys anywhere are an error, and all module
/// preconditions are validated at load time.
struct ExperimentConfig {
    double period = 1.0;
    double budget = 1.0;
    std::vector<SourceConfig> sources;
    PolicySpec policy;
    SimMode mode = SimMode::Deterministic;
    std::int64_t horizon = 1000;
    std::optional<std::int64_t> warmup;
    std::optional<std::uint64_t> seed;
    ArrivalModel arrivals;
    std::optional<std::string> out_dir;

    FleetParams fleet() const;
    RunSpec run_spec() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace crawl
