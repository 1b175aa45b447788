#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pepa/action.hpp"

namespace pepa {

enum class NodeKind : std::uint8_t { room, home, charger, elevator, stairs };

struct NodeSpec {
    std::string name;
    int floor = 1;
    int x = 0;  // position along the floor corridor, one tick of walking per unit
    NodeKind kind = NodeKind::room;
};

enum class EventCategory : std::uint8_t { exploration_request, affection_request, task_request };

struct UserEvent {
    int tick = 0;
    std::string text;
    EventCategory category = EventCategory::exploration_request;
    LocationId target = kNoLocation;  // where the owner wants the agent to go
    std::optional<Method> method;     // method named in the command, if any

    friend bool operator==(const UserEvent&, const UserEvent&) = default;
};

/// Poisson-like daily request schedule drawn from the episode seed.
struct EventGenerator {
    double requests_per_hour = 0.5;
    int first_tick = 420;
    int last_tick = 1260;
    double exploration_share = 0.4;
    double affection_share = 0.35;  // remainder are task requests
};

/// Every tunable constant of the sandbox. Battery costs are percentages and
/// must be multiples of 0.0001 (the bookkeeping unit).
struct SimConfig {
    std::string rng = "mt19937_64";

    // battery drain, percent
    double cost_rest_per_tick = 0.01;
    double cost_expression = 0.15;
    double cost_locomotion = 0.3;
    double cost_walk_per_tick = 0.15;
    double cost_elevator_per_tick = 0.1;
    double cost_stairs_per_tick = 0.2;
    double charge_rate = 0.8;

    // motor temperature
    double ambient_temp = 25.0;
    double heat_locomotion = 2.0;
    double heat_expression = 0.6;
    double heat_travel = 0.4;
    double cooling_fraction = 0.05;  // share of the excess over ambient shed per rest tick
    double overheat_temp = 70.0;

    // stochastic failures
    double action_failure_prob = 0.02;
    double overheat_failure_prob = 0.5;
    double walk_failure_prob = 0.02;
    double elevator_phase_failure_prob = 0.05;
    double stairs_failure_prob = 0.10;
    int stairs_ticks_per_floor = 3;

    // mood dynamics
    double mood_decay_per_tick = 0.003;
    double mood_gain_affection = 0.03;
    double mood_gain_positive = 0.02;
    double mood_gain_explore = 0.005;
    double mood_gain_request = 0.2;
    double mood_loss_failure = 0.05;

    // extrinsic reward
    double reward_request_completed = 1.0;
    double reward_episode_failure = 0.0;  // depletion is learned through reflection

    int event_timeout = 90;
    int failure_window = 60;  // ticks counted by recent_failures

    std::vector<NodeSpec> nodes;
    std::vector<UserEvent> schedule;          // explicit events, always included
    std::optional<EventGenerator> generator;  // extra events drawn per seed

    /// The shipped calibration (mirrors config/sim_default.json).
    static SimConfig defaults();
};

/// Throws ConfigError naming the first offending field.
void validate(const SimConfig& cfg);

SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& cfg);
SimConfig load_sim_config(const std::filesystem::path& path);

std::string_view to_string(NodeKind k);
std::string_view to_string(EventCategory c);
std::optional<EventCategory> parse_event_category(std::string_view s);

/// Battery bookkeeping unit: 1e-4 percent.
using BatteryUnits = std::int64_t;
inline constexpr BatteryUnits kBatteryScale = 10000;
inline constexpr BatteryUnits kBatteryFull = 100 * kBatteryScale;
BatteryUnits to_battery_units(double percent);
inline double to_percent(BatteryUnits u) { return static_cast<double>(u) / kBatteryScale; }

}  // namespace pepa
