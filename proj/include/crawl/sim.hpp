#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "crawl/model.hpp"
#include "crawl/policy.hpp"

namespace crawl {

enum class SimMode { Deterministic, Stochastic };

enum class XiDistribution { Constant, Exponential };

/// Law of the per-item base value xi; both choices have mean xi_mean.
struct ArrivalModel {
    XiDistribution xi = XiDistribution::Constant;
    // Test hook: score every arrival as if it landed at the period boundary
    // (no within-period decay), so E[U] = lambda * T * xi_mean.
    bool arrivals_at_period_end = false;
};

using Rng = std::mt19937_64;

/// Value accumulated by one source over one period: a Poisson(lambda T)
/// number of arrivals at uniform times, each discounted to the period end.
/// E[U] equals the source's per-period constant u.
double sample_net_utility(const SourceParams& p, const ArrivalModel& model, Rng& rng);

/// Applies the crawl/no-crawl transition per source.
void step_deterministic(std::vector<double>& states, const ActionVector& actions,
                        const FleetParams& fleet);

/// Stochastic transition: x -> alpha x + U when idle, x -> U when crawled.
/// Draws one net utility per source in id order regardless of the action.
void step_stochastic(std::vector<double>& states, const ActionVector& actions,
                     const FleetParams& fleet, const ArrivalModel& model, Rng& rng);

/// Everything observed in one epoch, recorded before the transition.
struct EpochRecord {
    std::int64_t epoch = 0;
    std::vector<double> states;   // before the action
    std::vector<double> indices;  // whittle index at those states
    ActionVector actions;
    std::vector<double> rewards;  // state if crawled, else 0
    double total_reward = 0.0;
    double total_cost = 0.0;
};

using Trace = std::vector<EpochRecord>;

struct CycleInfo {
    std::int64_t period = 0;
    std::vector<ActionVector> pattern;  // one ActionVector per epoch of the cycle
};

struct SourceStats {
    std::int64_t crawl_count = 0;
    std::map<std::int64_t, std::int64_t> intercrawl_histogram;
};

/// Long-run figures. Unless named otherwise, fields cover the post-warmup
/// window only.
struct Summary {
    std::int64_t horizon = 0;
    std::int64_t warmup = 0;
    double average_reward = 0.0;
    double average_reward_no_warmup = 0.0;  // includes the warmup epochs
    double average_cost = 0.0;
    std::vector<SourceStats> per_source;
    std::optional<CycleInfo> cycle;
    std::int64_t budget_clips = 0;
    std::optional<std::int64_t> rr_cursor_final;
};

struct RunSpec {
    SimMode mode = SimMode::Deterministic;
    std::int64_t horizon = 1000;
    std::optional<std::int64_t> warmup;  // default: horizon / 10
    std::optional<std::uint64_t> seed;   // required in stochastic mode
    std::vector<double> x0;              // empty: start every source at u_i
    ArrivalModel arrivals;
};

struct RunResult {
    Trace trace;
    Summary summary;
};

/// Simulates epochs 0..horizon-1: observe states, compute indices, select
/// actions, collect pre-crawl rewards, transition. Throws
/// std::invalid_argument on inconsistent spec (warmup >= horizon, stochastic
/// without seed, x0 size mismatch).
RunResult run(const FleetParams& fleet, const PolicySpec& policy, const RunSpec& spec);

/// Smallest period p <= max_period with actions[t] == actions[t+p] for the
/// whole window; nullopt when none exists.
std::optional<CycleInfo> detect_cycle(const std::vector<ActionVector>& actions,
                                      std::int64_t max_period);

}  // namespace crawl
