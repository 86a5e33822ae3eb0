#include "crawl/policy.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "crawl/whittle.hpp"

namespace crawl {

namespace {

// Absolute slack so that costs summing to exactly M survive rounding.
double budget_eps(const FleetParams& fleet) {
    return 1e-9 * std::max(1.0, fleet.budget);
}

// Greedy knapsack fill over a priority order: take whatever still fits.
ActionVector fill_by_priority(const std::vector<double>& keys, const FleetParams& fleet) {
    const std::size_t n = fleet.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b]) return keys[a] > keys[b];
        return a < b;  // tie: lower id first
    });
    ActionVector actions(n, 0);
    const double limit = fleet.budget + budget_eps(fleet);
    double spent = 0.0;
    for (std::size_t id : order) {
        const double c = fleet.sources[id].cost;
        if (spent + c <= limit) {
            actions[id] = 1;
            spent += c;
        }
    }
    return actions;
}

}  // namespace

void validate_policy(const PolicySpec& spec, std::size_t n_sources) {
    if (spec.kind == PolicyKind::Static) {
        if (spec.schedule.size() != n_sources)
            throw std::invalid_argument("policy: static schedule must list every source");
        for (const StaticEntry& e : spec.schedule)
            if (e.period.has_value() && *e.period < 1)
                throw std::invalid_argument("policy: static periods must be >= 1");
    } else if (!spec.schedule.empty()) {
        throw std::invalid_argument("policy: schedule only valid for the static kind");
    }
}

ActionVector select_whittle(const std::vector<double>& states, const FleetParams& fleet) {
    if (states.size() != fleet.size())
        throw std::invalid_argument("select_whittle: state/fleet size mismatch");
    std::vector<double> indices(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        indices[i] = whittle_index(states[i], fleet.sources[i]);
    return fill_by_priority(indices, fleet);
}

ActionVector select_greedy_state(const std::vector<double>& states, const FleetParams& fleet) {
    if (states.size() != fleet.size())
        throw std::invalid_argument("select_greedy_state: state/fleet size mismatch");
    return fill_by_priority(states, fleet);
}

ActionVector select_static(std::int64_t epoch, const FleetParams& fleet,
                           const std::vector<StaticEntry>& schedule, std::int64_t* clipped) {
    const std::size_t n = fleet.size();
    if (schedule.size() != n)
        throw std::invalid_argument("select_static: schedule/fleet size mismatch");
    ActionVector actions(n, 0);
    const double limit = fleet.budget + budget_eps(fleet);
    double spent = 0.0;
    std::int64_t dropped = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const StaticEntry& e = schedule[i];
        if (!e.period.has_value()) continue;
        const std::int64_t p = *e.period;
        if (p < 1) throw std::invalid_argument("select_static: period must be >= 1");
        const std::int64_t phase = ((epoch - e.offset) % p + p) % p;
        if (phase != 0) continue;
        const double c = fleet.sources[i].cost;
        if (spent + c <= limit) {
            actions[i] = 1;
            spent += c;
        } else {
            ++dropped;
        }
    }
    if (clipped != nullptr) *clipped = dropped;
    return actions;
}

ActionVector select_round_robin(const FleetParams& fleet, std::int64_t& cursor) {
    const auto n = static_cast<std::int64_t>(fleet.size());
    ActionVector actions(n, 0);
    const double limit = fleet.budget + budget_eps(fleet);
    double spent = 0.0;
    std::int64_t taken = 0;
    for (; taken < n; ++taken) {
        const std::int64_t id = (cursor + taken) % n;
        const double c = fleet.sources[id].cost;
        if (spent + c > limit) break;
        actions[id] = 1;
        spent += c;
    }
    if (taken == 0)
        cursor = (cursor + 1) % n;  // head does not fit; skip it rather than stall
    else
        cursor = (cursor + taken) % n;
    return actions;
}

Policy::Policy(PolicySpec spec, std::size_t n_sources) : spec_(std::move(spec)) {
    validate_policy(spec_, n_sources);
}

ActionVector Policy::select(std::int64_t epoch, const std::vector<double>& states,
                            const std::vector<double>& indices, const FleetParams& fleet) {
    switch (spec_.kind) {
        case PolicyKind::Whittle:
            if (indices.size() != fleet.size())
                throw std::invalid_argument("policy: whittle needs one index per source");
            return fill_by_priority(indices, fleet);
        case PolicyKind::GreedyState:
            return select_greedy_state(states, fleet);
        case PolicyKind::RoundRobin:
            return select_round_robin(fleet, cursor_);
        case PolicyKind::Static: {
            std::int64_t dropped = 0;
            ActionVector a = select_static(epoch, fleet, spec_.schedule, &dropped);
            budget_clips_ += dropped;
            return a;
        }
    }
    throw std::logic_error("policy: unknown kind");
}

}  // namespace crawl
