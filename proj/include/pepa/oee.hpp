#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pepa/memory.hpp"
#include "pepa/reward.hpp"

namespace pepa {

/// Actions executed while one goal set was active. `actions` is the
/// canonical serialization: one action_to_text() line per executed tick.
struct GoalTrajectory {
    int day = 1;
    int goals_version = 0;
    std::string actions;
    friend bool operator==(const GoalTrajectory&, const GoalTrajectory&) = default;
};

std::string canonical_actions(const std::vector<Action>& actions, const Building& b);

/// Splits a log by (day, goals=vN) context tag, in log order.
std::vector<GoalTrajectory> trajectories_from_log(const std::vector<EpisodicRecord>& records, const Building& b);

/// Pairs are 1-based positions (i < j) in the checked lists.
struct RecurrenceReport {
    std::optional<std::pair<std::size_t, std::size_t>> state_recurrence;
    std::optional<std::pair<std::size_t, std::size_t>> rule_recurrence;
    std::size_t horizon = 0;  // trajectories examined
    std::size_t spec_horizon = 0;
};

nlohmann::json to_json(const RecurrenceReport& r);

/// Exhaustive pairwise check, digest first and then direct comparison.
/// Reports the first equal pair in (j, i) lexicographic order. Specs are
/// compared on their rules only, since versions always differ along a
/// chain. Throws std::invalid_argument when either list is empty.
RecurrenceReport oee_check(const std::vector<GoalTrajectory>& trajectories, const std::vector<RewardSpec>& specs);

}  // namespace pepa
