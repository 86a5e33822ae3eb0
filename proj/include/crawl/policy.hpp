#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crawl/model.hpp"

namespace crawl {

/// Per-source activation bits for one epoch.
using ActionVector = std::vector<std::uint8_t>;

enum class PolicyKind { Whittle, GreedyState, RoundRobin, Static };

struct StaticEntry {
    std::optional<std::int64_t> period;  // absent: never crawl this source
    std::int64_t offset = 0;
};

struct PolicySpec {
    PolicyKind kind = PolicyKind::Whittle;
    std::vector<StaticEntry> schedule;  // one entry per source iff kind == Static
};

/// Throws std::invalid_argument on kind/schedule mismatches or periods < 1.
void validate_policy(const PolicySpec& spec, std::size_t n_sources);

/// Ranks sources by decreasing index gamma_i(x_i) (ties to the lower id) and
/// greedily activates every source whose cost still fits within the budget.
ActionVector select_whittle(const std::vector<double>& states, const FleetParams& fleet);

/// Same budget fill, ranked by the raw state instead of the index.
ActionVector select_greedy_state(const std::vector<double>& states, const FleetParams& fleet);

/// Source i wants to crawl when (epoch - offset_i) mod period_i == 0; wants
/// are clipped to the budget in id order. `clipped`, when given, receives
/// the number of scheduled activations dropped this epoch.
ActionVector select_static(std::int64_t epoch, const FleetParams& fleet,
                           const std::vector<StaticEntry>& schedule,
                           std::int64_t* clipped = nullptr);

/// Activates consecutive sources starting at `cursor` while they fit the
/// budget, then advances the cursor past the last activated source.
ActionVector select_round_robin(const FleetParams& fleet, std::int64_t& cursor);

/// Stateful dispatcher: owns the round-robin cursor and the running count of
/// budget-clipped static activations.
class Policy {
  public:
    Policy(PolicySpec spec, std::size_t n_sources);

    /// `indices` are the per-source Whittle indices at `states`; only the
    /// whittle kind consults them.
    ActionVector select(std::int64_t epoch, const std::vector<double>& states,
                        const std::vector<double>& indices, const FleetParams& fleet);

    const PolicySpec& spec() const { return spec_; }
    std::int64_t budget_clips() const { return budget_clips_; }
    std::int64_t cursor() const { return cursor_; }

  private:
    PolicySpec spec_;
    std::int64_t cursor_ = 0;
    std::int64_t budget_clips_ = 0;
};

}  // namespace crawl
