#include "pepa/oee.hpp"

#include <stdexcept>
#include <unordered_map>

#include "pepa/digest.hpp"

namespace pepa {

std::string canonical_actions(const std::vector<Action>& actions, const Building& b) {
    std::string out;
    for (const auto& a : actions) {
        out += action_to_text(a, b);
        out += '\n';
    }
    return out;
}

std::vector<GoalTrajectory> trajectories_from_log(const std::vector<EpisodicRecord>& records, const Building& b) {
    std::vector<GoalTrajectory> out;
    std::vector<Action> current;
    auto flush = [&] {
        if (!out.empty()) out.back().actions = canonical_actions(current, b);
        current.clear();
    };
    for (const auto& r : records) {
        const auto tag = context_value(r, "goals");
        if (!tag || tag->size() < 2 || (*tag)[0] != 'v')
            throw std::invalid_argument("record " + std::to_string(r.id) + " has no goals=vN tag");
        const int version = std::stoi(tag->substr(1));
        if (out.empty() || out.back().day != r.day || out.back().goals_version != version) {
            flush();
            out.push_back({r.day, version, {}});
        }
        current.push_back(r.action);
    }
    flush();
    return out;
}

namespace {

std::string rules_text(const RewardSpec& s) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& r : s.rules) rules.push_back(to_json(r));
    return rules.dump();
}

template <class T, class Key, class Eq>
std::optional<std::pair<std::size_t, std::size_t>> first_repeat(const std::vector<T>& items, Key key, Eq equal) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
    for (std::size_t j = 0; j < items.size(); ++j) {
        auto& bucket = seen[fnv1a64(key(items[j]))];
        for (std::size_t i : bucket)
            if (equal(items[i], items[j])) return std::pair{i + 1, j + 1};
        bucket.push_back(j);
    }
    return std::nullopt;
}

}  // namespace

RecurrenceReport oee_check(const std::vector<GoalTrajectory>& trajectories, const std::vector<RewardSpec>& specs) {
    if (trajectories.empty()) throw std::invalid_argument("oee_check: no trajectories");
    if (specs.empty()) throw std::invalid_argument("oee_check: no specs");
    RecurrenceReport r;
    r.horizon = trajectories.size();
    r.spec_horizon = specs.size();
    r.state_recurrence = first_repeat(
        trajectories, [](const GoalTrajectory& t) -> const std::string& { return t.actions; },
        [](const GoalTrajectory& a, const GoalTrajectory& b) { return a.actions == b.actions; });
    r.rule_recurrence = first_repeat(
        specs, [](const RewardSpec& s) { return rules_text(s); },
        [](const RewardSpec& a, const RewardSpec& b) { return a.rules == b.rules; });
    return r;
}

nlohmann::json to_json(const RecurrenceReport& r) {
    auto pair = [](const auto& p) -> nlohmann::json {
        if (!p) return nullptr;
        return nlohmann::json::array({p->first, p->second});
    };
    const bool none = !r.state_recurrence && !r.rule_recurrence;
    return {{"schema", "pepa.oee"},
            {"version", 1},
            {"state_recurrence", pair(r.state_recurrence)},
            {"rule_recurrence", pair(r.rule_recurrence)},
            {"horizon", r.horizon},
            {"spec_horizon", r.spec_horizon},
            {"verdict", none ? "non-recurring within horizon" : "recurrence found"}};
}

}  // namespace pepa
