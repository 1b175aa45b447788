#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pepa/action.hpp"
#include "pepa/building.hpp"
#include "pepa/rng.hpp"
#include "pepa/sim_config.hpp"

namespace pepa {

inline constexpr int kTicksPerDay = 1440;

enum class ElevatorPhase : std::uint8_t { call, wait, enter_select, exit_relocalize };

struct ElevatorFsm {
    ElevatorPhase phase = ElevatorPhase::call;
    int target_floor = 1;
    friend bool operator==(const ElevatorFsm&, const ElevatorFsm&) = default;
};

/// A move_to that spans several ticks.
struct Travel {
    Action action;
    std::array<Leg, 3> legs{};
    std::uint8_t leg_count = 0;
    std::uint8_t leg_index = 0;
    int remaining = 0;  // ticks left in the current walk/stairs leg
    int ticks_done = 0;
    ElevatorFsm fsm;

    const Leg& leg() const { return legs[leg_index]; }
    friend bool operator==(const Travel&, const Travel&) = default;
};

struct WorldState {
    BatteryUnits battery_units = kBatteryFull;
    double motor_temp = 25.0;
    LocationId location = kNoLocation;
    int floor = 1;
    int clock = 0;
    double mood = 0.5;
    std::vector<UserEvent> pending_events;
    bool charging = false;
    std::optional<Travel> travel;
    std::vector<int> failure_ticks;  // ticks of failed actions inside the failure window
    int active_streak = 0;           // consecutive non-resting ticks
    int requests_completed = 0;

    double battery() const { return to_percent(battery_units); }
    int recent_failures() const { return static_cast<int>(failure_ticks.size()); }
    const UserEvent* pending_command() const {
        return pending_events.empty() ? nullptr : &pending_events.front();
    }
    friend bool operator==(const WorldState&, const WorldState&) = default;
};

enum class Outcome : std::uint8_t { success, failure, partial };
std::string_view to_string(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view s);

struct Resources {
    int time = 1;                 // ticks
    double energy = 0.0;          // battery percent consumed
    double charge_gain = 0.0;     // battery percent gained from the charger
    BatteryUnits energy_units = 0;
    BatteryUnits charge_units = 0;
};

struct Observation {
    std::vector<UserEvent> new_events;
    std::string note;
};

struct StepOutcome {
    WorldState post_state;
    Observation observation;
    double extrinsic_reward = 0.0;
    Outcome outcome = Outcome::success;
    Resources resources;
    std::string cause;  // failure cause, empty on success
    int requests_completed = 0;
};

struct ElevatorStep {
    ElevatorFsm fsm;
    StepOutcome outcome;
    bool ride_complete = false;
};

/// true iff the battery is empty or the day is over.
bool is_terminal(const WorldState& s);

/// Fixed reporting category of an action; move_to home or charger is Return.
Category action_category(const Action& a, const Building& building);

/// Deterministic seeded sandbox. One instance per episode; not thread-safe.
class World {
public:
    /// Throws ConfigError when the configuration is invalid.
    explicit World(SimConfig config);

    /// Initial state for a new day: full battery, ambient temperature, at
    /// home, clock 0. Draws the day's hidden event schedule from `seed`.
    WorldState reset(std::uint64_t seed);

    /// Advances one tick. A move_to equal to the travel in progress continues
    /// it; any other action cancels the travel.
    StepOutcome step(const WorldState& state, const Action& action);

    /// Same as step() but draws failures from `draws` instead of the
    /// episode stream. Used by planners stepping private copies.
    StepOutcome step(const WorldState& state, const Action& action, Rng& draws);

    /// Executes the current elevator phase. Throws LocationError unless the
    /// agent stands at an elevator node.
    ElevatorStep elevator_step(const ElevatorFsm& fsm, const WorldState& state);

    /// Replaces the action-failure stream without touching the schedule.
    void reseed(std::uint64_t seed) { draws_ = Rng(seed); }

    const SimConfig& config() const { return config_; }
    const Building& building() const { return building_; }
    const std::vector<UserEvent>& schedule() const { return schedule_; }
    Category category(const Action& a) const { return action_category(a, building_); }

    /// Nodes the agent may be sent to when generating requests.
    std::vector<LocationId> request_targets() const;

private:
    struct TickEffects {
        BatteryUnits cost = 0;
        bool charge = false;
        bool rest = false;
        double heat = 0.0;
        double mood_gain = 0.0;
        Outcome outcome = Outcome::success;
        std::string cause;
    };

    bool advance_elevator(ElevatorFsm& fsm, WorldState& n, TickEffects& fx);
    void travel_tick(WorldState& n, TickEffects& fx);
    StepOutcome finish_tick(const WorldState& pre, WorldState n, TickEffects fx, const Action& a);
    std::vector<UserEvent> generate_events(std::uint64_t seed) const;

    SimConfig config_;
    Building building_;
    Rng& draws() { return override_ ? *override_ : draws_; }

    Rng draws_;
    Rng* override_ = nullptr;
    std::vector<UserEvent> schedule_;
    BatteryUnits cost_rest_ = 0, cost_expression_ = 0, cost_locomotion_ = 0;
    BatteryUnits cost_walk_ = 0, cost_elevator_ = 0, cost_stairs_ = 0, charge_rate_ = 0;
};

/// true when `a` advances the oldest pending command.
bool serves_command(const WorldState& s, const Action& a, const Building& b);

nlohmann::json state_to_json(const WorldState& s);
WorldState state_from_json(const nlohmann::json& j);
nlohmann::json action_to_json(const Action& a, const Building& b);
Action action_from_json(const nlohmann::json& j);
std::string action_to_text(const Action& a, const Building& b);
nlohmann::json event_to_json(const UserEvent& e);
UserEvent event_from_json(const nlohmann::json& j);
nlohmann::json outcome_to_json(const StepOutcome& o);

}  // namespace pepa
