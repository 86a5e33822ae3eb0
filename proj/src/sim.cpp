#include "crawl/sim.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "crawl/whittle.hpp"

namespace crawl {

double sample_net_utility(const SourceParams& p, const ArrivalModel& model, Rng& rng) {
    std::poisson_distribution<std::int64_t> count_dist(p.lambda_rate * p.period);
    std::uniform_real_distribution<double> time_dist(0.0, p.period);
    std::exponential_distribution<double> xi_dist(1.0 / p.xi_mean);

    const std::int64_t count = count_dist(rng);
    double total = 0.0;
    for (std::int64_t j = 0; j < count; ++j) {
        const double tau = time_dist(rng);
        const double weight =
            model.arrivals_at_period_end ? 1.0 : std::exp(-p.mu * (p.period - tau));
        const double xi = model.xi == XiDistribution::Constant ? p.xi_mean : xi_dist(rng);
        total += xi * weight;
    }
    return total;
}

void step_deterministic(std::vector<double>& states, const ActionVector& actions,
                        const FleetParams& fleet) {
    for (std::size_t i = 0; i < fleet.size(); ++i)
        states[i] = actions[i] ? active_step(fleet.sources[i])
                               : passive_step(states[i], fleet.sources[i]);
}

void step_stochastic(std::vector<double>& states, const ActionVector& actions,
                     const FleetParams& fleet, const ArrivalModel& model, Rng& rng) {
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        const double util = sample_net_utility(fleet.sources[i], model, rng);
        states[i] = actions[i] ? util : fleet.sources[i].alpha * states[i] + util;
    }
}

std::optional<CycleInfo> detect_cycle(const std::vector<ActionVector>& actions,
                                      std::int64_t max_period) {
    const auto len = static_cast<std::int64_t>(actions.size());
    for (std::int64_t p = 1; p <= max_period && p < len; ++p) {
        bool ok = true;
        for (std::int64_t t = 0; t + p < len; ++t) {
            if (actions[t] != actions[t + p]) {
                ok = false;
                break;
            }
        }
        if (ok) {
            CycleInfo info;
            info.period = p;
            info.pattern.assign(actions.begin(), actions.begin() + p);
            return info;
        }
    }
    return std::nullopt;
}

RunResult run(const FleetParams& fleet, const PolicySpec& policy_spec, const RunSpec& spec) {
    const std::size_t n = fleet.size();
    const std::int64_t warmup = spec.warmup.value_or(spec.horizon / 10);
    if (warmup < 0 || spec.horizon <= warmup)
        throw std::invalid_argument("run: need horizon > warmup >= 0");
    if (spec.mode == SimMode::Stochastic && !spec.seed.has_value())
        throw std::invalid_argument("run: stochastic mode requires a seed");
    if (!spec.x0.empty() && spec.x0.size() != n)
        throw std::invalid_argument("run: x0 must list every source");

    std::vector<double> states(n);
    bool warned = false;
    for (std::size_t i = 0; i < n; ++i) {
        states[i] = spec.x0.empty() ? fleet.sources[i].u : spec.x0[i];
        if (states[i] < 0.0)
            throw std::invalid_argument("run: initial states must be nonnegative");
        const bool transient =
            states[i] < fleet.sources[i].u || states[i] > fleet.sources[i].u_star;
        if (transient && !warned) {
            std::cerr << "crawlsim: initial state of source " << i + 1 << " lies outside ["
                      << fleet.sources[i].u << ", " << fleet.sources[i].u_star
                      << "]; treating it as a transient\n";
            warned = true;
        }
    }

    Policy policy(policy_spec, n);
    Rng rng(spec.seed.value_or(0));

    Trace trace;
    trace.reserve(spec.horizon);
    double reward_post = 0.0, reward_all = 0.0, cost_post = 0.0;
    std::vector<std::int64_t> last_crawl(n, -1);
    std::vector<SourceStats> stats(n);

    for (std::int64_t t = 0; t < spec.horizon; ++t) {
        EpochRecord rec;
        rec.epoch = t;
        rec.states = states;
        rec.indices.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            rec.indices[i] = whittle_index(states[i], fleet.sources[i]);
        rec.actions = policy.select(t, states, rec.indices, fleet);
        rec.rewards.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            rec.rewards[i] = rec.actions[i] ? states[i] : 0.0;
            rec.total_reward += rec.rewards[i];
            rec.total_cost += rec.actions[i] ? fleet.sources[i].cost : 0.0;
        }

        reward_all += rec.total_reward;
        if (t >= warmup) {
            reward_post += rec.total_reward;
            cost_post += rec.total_cost;
            for (std::size_t i = 0; i < n; ++i) {
                if (!rec.actions[i]) continue;
                ++stats[i].crawl_count;
                if (last_crawl[i] >= warmup)
                    ++stats[i].intercrawl_histogram[t - last_crawl[i]];
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (rec.actions[i]) last_crawl[i] = t;

        if (spec.mode == SimMode::Deterministic)
            step_deterministic(states, rec.actions, fleet);
        else
            step_stochastic(states, rec.actions, fleet, spec.arrivals, rng);
        trace.push_back(std::move(rec));
    }

    Summary summary;
    summary.horizon = spec.horizon;
    summary.warmup = warmup;
    const auto post_len = static_cast<double>(spec.horizon - warmup);
    summary.average_reward = reward_post / post_len;
    summary.average_reward_no_warmup = reward_all / static_cast<double>(spec.horizon);
    summary.average_cost = cost_post / post_len;
    summary.per_source = std::move(stats);
    summary.budget_clips = policy.budget_clips();
    if (policy_spec.kind == PolicyKind::RoundRobin) summary.rr_cursor_final = policy.cursor();

    std::vector<ActionVector> post_actions;
    post_actions.reserve(spec.horizon - warmup);
    for (std::int64_t t = warmup; t < spec.horizon; ++t)
        post_actions.push_back(trace[t].actions);
    summary.cycle = detect_cycle(post_actions, spec.horizon / 4);

    return {std::move(trace), std::move(summary)};
}

}  // namespace crawl
