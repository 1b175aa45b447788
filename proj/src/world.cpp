#include "pepa/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pepa/errors.hpp"

namespace pepa {

using nlohmann::json;

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::success: return "success";
        case Outcome::failure: return "failure";
        case Outcome::partial: return "partial";
    }
    return "success";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
    if (s == "success") return Outcome::success;
    if (s == "failure") return Outcome::failure;
    if (s == "partial") return Outcome::partial;
    return std::nullopt;
}

bool is_terminal(const WorldState& s) { return s.battery_units <= 0 || s.clock >= kTicksPerDay; }

Category action_category(const Action& a, const Building& building) {
    switch (a.kind) {
        case ActionKind::idle:
        case ActionKind::rest:
        case ActionKind::sit:
        case ActionKind::lie_down:
        case ActionKind::stretch:
            return Category::Rest;
        case ActionKind::wander:
        case ActionKind::trot:
        case ActionKind::sniff_around:
            return Category::Explore;
        case ActionKind::spin:
        case ActionKind::jump:
        case ActionKind::express_happy:
        case ActionKind::express_excited:
        case ActionKind::dance:
            return Category::PositiveEmotion;
        case ActionKind::nuzzle:
        case ActionKind::give_paw:
        case ActionKind::cuddle:
            return Category::Affection;
        case ActionKind::express_thinking:
        case ActionKind::express_curious:
            return Category::Think;
        case ActionKind::move_to:
            return (a.target == building.home() || a.target == building.charger()) ? Category::Return
                                                                                    : Category::Explore;
    }
    return Category::Rest;
}

bool serves_command(const WorldState& s, const Action& a, const Building& b) {
    const UserEvent* cmd = s.pending_command();
    if (!cmd) return false;
    if (cmd->category == EventCategory::affection_request) {
        if (s.location == b.home()) return action_category(a, b) == Category::Affection;
        return a.is_move() && a.target == b.home();
    }
    return a.is_move() && a.target == cmd->target;
}

World::World(SimConfig config) : config_(std::move(config)) {
    validate(config_);
    building_ = Building(config_.nodes);
    cost_rest_ = to_battery_units(config_.cost_rest_per_tick);
    cost_expression_ = to_battery_units(config_.cost_expression);
    cost_locomotion_ = to_battery_units(config_.cost_locomotion);
    cost_walk_ = to_battery_units(config_.cost_walk_per_tick);
    cost_elevator_ = to_battery_units(config_.cost_elevator_per_tick);
    cost_stairs_ = to_battery_units(config_.cost_stairs_per_tick);
    charge_rate_ = to_battery_units(config_.charge_rate);
}

std::vector<LocationId> World::request_targets() const {
    std::vector<LocationId> out;
    for (LocationId r : building_.rooms())
        if (r != building_.home() && r != building_.charger()) out.push_back(r);
    return out;
}

std::vector<UserEvent> World::generate_events(std::uint64_t seed) const {
    std::vector<UserEvent> events = config_.schedule;
    if (config_.generator) {
        const auto& g = *config_.generator;
        Rng rng(mix_seed(seed, 0));
        const auto targets = request_targets();
        const double p = g.requests_per_hour / 60.0;
        for (int t = g.first_tick; t <= g.last_tick; ++t) {
            if (!rng.bernoulli(p)) continue;
            UserEvent e;
            e.tick = t;
            const double u = rng.uniform();
            const std::uint64_t variant = rng.below(2);
            if (u < g.affection_share) {
                e.category = EventCategory::affection_request;
                e.text = variant == 0 ? "come here and cuddle with me" : "i missed you come say hello";
            } else {
                e.category = u < g.affection_share + g.exploration_share ? EventCategory::exploration_request
                                                                         : EventCategory::task_request;
                e.target = targets.empty() ? building_.home() : targets[rng.below(targets.size())];
                const std::string room(building_.name(e.target));
                if (building_.floor_of(e.target) != building_.floor_of(building_.home()) && rng.below(2) == 0)
                    e.method = rng.below(2) == 0 ? Method::elevator : Method::stairs;
                const std::string how = e.method ? " by " + std::string(to_string(*e.method)) : "";
                if (e.category == EventCategory::exploration_request)
                    e.text = variant == 0 ? "go to " + room + how : "please explore " + room + how;
                else
                    e.text = variant == 0 ? "take the parcel to " + room + how : "check on " + room + how;
            }
            events.push_back(std::move(e));
        }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const UserEvent& a, const UserEvent& b) { return a.tick < b.tick; });
    return events;
}

WorldState World::reset(std::uint64_t seed) {
    draws_ = Rng(mix_seed(seed, 1));
    schedule_ = generate_events(seed);
    WorldState s;
    s.battery_units = kBatteryFull;
    s.motor_temp = config_.ambient_temp;
    s.location = building_.home();
    s.floor = building_.floor_of(s.location);
    s.clock = 0;
    s.mood = 0.5;
    for (const auto& e : schedule_)
        if (e.tick == 0) s.pending_events.push_back(e);
    return s;
}

bool World::advance_elevator(ElevatorFsm& fsm, WorldState& n, TickEffects& fx) {
    fx.cost = cost_elevator_;
    fx.heat = 0.0;
    fx.rest = false;
    if (draws().bernoulli(config_.elevator_phase_failure_prob)) {
        fx.outcome = Outcome::failure;
        static constexpr std::array<const char*, 4> kPhase = {"call", "wait", "enter_select", "exit_relocalize"};
        fx.cause = std::string("elevator failure in phase ") + kPhase[static_cast<int>(fsm.phase)];
        return false;
    }
    if (fsm.phase == ElevatorPhase::exit_relocalize) {
        const auto arrival = building_.elevator_on(fsm.target_floor);
        if (!arrival) throw LocationError("no elevator on floor " + std::to_string(fsm.target_floor));
        n.location = *arrival;
        n.floor = fsm.target_floor;
        return true;
    }
    fsm.phase = static_cast<ElevatorPhase>(static_cast<int>(fsm.phase) + 1);
    fx.outcome = Outcome::partial;
    return false;
}

ElevatorStep World::elevator_step(const ElevatorFsm& fsm, const WorldState& state) {
    if (is_terminal(state)) throw EpisodeOverError("episode is over");
    if (state.location == kNoLocation || building_.node(state.location).kind != NodeKind::elevator)
        throw LocationError("elevator_step invoked away from an elevator node");
    ElevatorStep out;
    out.fsm = fsm;
    WorldState n = state;
    n.travel.reset();
    n.charging = false;
    TickEffects fx;
    out.ride_complete = advance_elevator(out.fsm, n, fx);
    out.outcome = finish_tick(state, std::move(n), std::move(fx), Action::of(ActionKind::idle));
    return out;
}

void World::travel_tick(WorldState& n, TickEffects& fx) {
    Travel& t = *n.travel;
    const Leg leg = t.leg();
    bool leg_done = false;
    fx.outcome = Outcome::partial;
    switch (leg.kind) {
        case LegKind::walk:
            fx.cost = cost_walk_;
            fx.heat = config_.heat_travel;
            if (t.ticks_done == 0 && draws().bernoulli(config_.walk_failure_prob)) {
                fx.outcome = Outcome::failure;
                fx.cause = "navigation failure while walking";
                n.travel.reset();
                return;
            }
            leg_done = --t.remaining <= 0;
            break;
        case LegKind::stairs:
            fx.cost = cost_stairs_;
            fx.heat = config_.heat_travel * 2;
            if (t.remaining == leg.ticks && draws().bernoulli(config_.stairs_failure_prob)) {
                fx.outcome = Outcome::failure;
                fx.cause = "navigation failure on stairs";
                n.travel.reset();
                return;
            }
            leg_done = --t.remaining <= 0;
            break;
        case LegKind::elevator: {
            leg_done = advance_elevator(t.fsm, n, fx);
            if (fx.outcome == Outcome::failure) {
                n.travel.reset();
                return;
            }
            fx.heat = config_.heat_travel / 2;
            break;
        }
    }
    ++t.ticks_done;
    fx.outcome = Outcome::partial;
    if (!leg_done) return;
    n.location = leg.end;
    n.floor = building_.floor_of(leg.end);
    if (++t.leg_index >= t.leg_count) {
        fx.outcome = Outcome::success;
        n.travel.reset();
        return;
    }
    const Leg& next = t.leg();
    t.remaining = next.ticks;
    if (next.kind == LegKind::elevator) t.fsm = ElevatorFsm{ElevatorPhase::call, building_.floor_of(next.end)};
}

StepOutcome World::step(const WorldState& state, const Action& action, Rng& draws) {
    struct Restore {
        Rng*& slot;
        ~Restore() { slot = nullptr; }
    } restore{override_};
    override_ = &draws;
    return step(state, action);
}

StepOutcome World::step(const WorldState& state, const Action& action) {
    if (is_terminal(state)) throw EpisodeOverError("cannot step a terminal state");
    validate_action(action);
    WorldState n = state;
    n.charging = false;
    TickEffects fx;
    const Category cat = category(action);

    if (action.is_move()) {
        if (!n.travel || n.travel->action != action) {
            n.travel.reset();
            auto legs = action.target >= 0 && static_cast<std::size_t>(action.target) < building_.size()
                            ? building_.route(state.location, action.target, action.method,
                                              config_.stairs_ticks_per_floor)
                            : std::nullopt;
            if (!legs || legs->empty() || legs->size() > 3) {
                fx.cost = cost_rest_;
                fx.rest = true;
                fx.outcome = Outcome::failure;
                fx.cause = legs && legs->empty() ? "already at destination" : "no route for requested method";
            } else {
                Travel t;
                t.action = action;
                t.leg_count = static_cast<std::uint8_t>(legs->size());
                std::copy(legs->begin(), legs->end(), t.legs.begin());
                t.remaining = t.legs[0].ticks;
                if (t.legs[0].kind == LegKind::elevator)
                    t.fsm = ElevatorFsm{ElevatorPhase::call, building_.floor_of(t.legs[0].end)};
                n.travel = t;
            }
        }
        if (n.travel) {
            travel_tick(n, fx);
            if (fx.outcome == Outcome::success) fx.mood_gain = cat == Category::Explore ? config_.mood_gain_explore : 0.0;
        }
    } else {
        n.travel.reset();
        const bool at_charger = state.location == building_.charger();
        if (cat == Category::Rest && at_charger) {
            fx.charge = true;
            fx.rest = true;
        } else {
            switch (action.kind) {
                case ActionKind::idle:
                case ActionKind::rest:
                case ActionKind::sit:
                case ActionKind::lie_down:
                case ActionKind::stretch:
                    fx.cost = cost_rest_;
                    fx.rest = true;
                    break;
                default:
                    if (action_class(action.kind) == ActionClass::locomotion) {
                        fx.cost = cost_locomotion_;
                        fx.heat = config_.heat_locomotion;
                    } else {
                        fx.cost = cost_expression_;
                        fx.heat = config_.heat_expression;
                    }
                    break;
            }
        }
        if (!fx.rest) {
            const bool hot = state.motor_temp >= config_.overheat_temp;
            const double p = hot ? config_.overheat_failure_prob : config_.action_failure_prob;
            if (draws().bernoulli(p)) {
                fx.outcome = Outcome::failure;
                fx.cause = hot ? "overheated actuator" : "action failed";
            }
        }
        if (fx.outcome == Outcome::success) {
            switch (cat) {
                case Category::Affection: fx.mood_gain = config_.mood_gain_affection; break;
                case Category::PositiveEmotion: fx.mood_gain = config_.mood_gain_positive; break;
                case Category::Explore: fx.mood_gain = config_.mood_gain_explore; break;
                default: break;
            }
        }
    }
    return finish_tick(state, std::move(n), std::move(fx), action);
}

StepOutcome World::finish_tick(const WorldState& pre, WorldState n, TickEffects fx, const Action& a) {
    StepOutcome out;
    out.outcome = fx.outcome;
    out.cause = std::move(fx.cause);

    if (fx.charge) {
        const BatteryUnits gain = std::min(charge_rate_, kBatteryFull - n.battery_units);
        n.battery_units += gain;
        n.charging = true;
        out.resources.charge_units = gain;
    } else {
        const BatteryUnits used = std::min(fx.cost, n.battery_units);
        n.battery_units -= used;
        out.resources.energy_units = used;
    }
    out.resources.energy = to_percent(out.resources.energy_units);
    out.resources.charge_gain = to_percent(out.resources.charge_units);

    const double ambient = config_.ambient_temp;
    if (fx.rest)
        n.motor_temp = ambient + (n.motor_temp - ambient) * (1.0 - config_.cooling_fraction);
    else
        n.motor_temp += fx.heat;
    n.active_streak = fx.rest ? 0 : n.active_streak + 1;

    double mood = n.mood - config_.mood_decay_per_tick + fx.mood_gain;
    if (out.outcome == Outcome::failure) mood -= config_.mood_loss_failure;

    // Requests fulfilled this tick.
    const Category cat = category(a);
    if (out.outcome == Outcome::success) {
        auto done = [&](const UserEvent& e) {
            if (e.category == EventCategory::affection_request)
                return cat == Category::Affection && !a.is_move() && n.location == building_.home();
            return a.is_move() && n.location == e.target && e.target == a.target;
        };
        const auto before = n.pending_events.size();
        n.pending_events.erase(std::remove_if(n.pending_events.begin(), n.pending_events.end(), done),
                               n.pending_events.end());
        out.requests_completed = static_cast<int>(before - n.pending_events.size());
        n.requests_completed += out.requests_completed;
        out.extrinsic_reward += out.requests_completed * config_.reward_request_completed;
        mood += out.requests_completed * config_.mood_gain_request;
    }
    n.mood = std::clamp(mood, -1.0, 1.0);

    if (out.outcome == Outcome::failure) n.failure_ticks.push_back(pre.clock);
    n.clock = pre.clock + 1;
    const int window = config_.failure_window;
    n.failure_ticks.erase(std::remove_if(n.failure_ticks.begin(), n.failure_ticks.end(),
                                         [&](int t) { return t < n.clock - window; }),
                          n.failure_ticks.end());

    const int timeout = config_.event_timeout;
    n.pending_events.erase(std::remove_if(n.pending_events.begin(), n.pending_events.end(),
                                          [&](const UserEvent& e) { return n.clock > e.tick + timeout; }),
                           n.pending_events.end());
    for (const auto& e : schedule_) {
        if (e.tick == n.clock) {
            n.pending_events.push_back(e);
            out.observation.new_events.push_back(e);
        }
    }

    if (n.battery_units <= 0) {
        out.extrinsic_reward += config_.reward_episode_failure;
        out.observation.note = "battery depleted";
    }
    out.post_state = std::move(n);
    return out;
}

// ---------------------------------------------------------------------------
// serialization

json event_to_json(const UserEvent& e) {
    json j{{"tick", e.tick}, {"text", e.text}, {"category", to_string(e.category)}, {"target", e.target}};
    j["method"] = e.method ? json(to_string(*e.method)) : json(nullptr);
    return j;
}

UserEvent event_from_json(const json& j) {
    UserEvent e;
    e.tick = j.at("tick").get<int>();
    e.text = j.at("text").get<std::string>();
    auto cat = parse_event_category(j.at("category").get<std::string>());
    if (!cat) throw std::invalid_argument("unknown event category");
    e.category = *cat;
    e.target = j.at("target").get<LocationId>();
    if (!j.at("method").is_null()) {
        auto m = parse_method(j["method"].get<std::string>());
        if (!m) throw std::invalid_argument("unknown method");
        e.method = *m;
    }
    return e;
}

namespace {

json leg_to_json(const Leg& l) {
    return json::array({static_cast<int>(l.kind), l.end, l.ticks});
}

Leg leg_from_json(const json& j) {
    return Leg{static_cast<LegKind>(j.at(0).get<int>()), j.at(1).get<LocationId>(), j.at(2).get<int>()};
}

json raw_action(const Action& a) {
    json j{{"kind", to_string(a.kind)}};
    if (a.is_move()) {
        j["target"] = a.target;
        j["method"] = to_string(a.method);
    }
    return j;
}

}  // namespace

json state_to_json(const WorldState& s) {
    json j;
    j["battery_units"] = s.battery_units;
    j["motor_temp"] = s.motor_temp;
    j["location"] = s.location;
    j["floor"] = s.floor;
    j["clock"] = s.clock;
    j["mood"] = s.mood;
    j["pending_events"] = json::array();
    for (const auto& e : s.pending_events) j["pending_events"].push_back(event_to_json(e));
    j["charging"] = s.charging;
    if (s.travel) {
        const auto& t = *s.travel;
        json legs = json::array();
        for (int i = 0; i < t.leg_count; ++i) legs.push_back(leg_to_json(t.legs[i]));
        j["travel"] = {{"action", raw_action(t.action)}, {"legs", legs},          {"leg_index", t.leg_index},
                       {"remaining", t.remaining},        {"ticks_done", t.ticks_done},
                       {"fsm_phase", static_cast<int>(t.fsm.phase)}, {"fsm_target_floor", t.fsm.target_floor}};
    } else {
        j["travel"] = nullptr;
    }
    j["failure_ticks"] = s.failure_ticks;
    j["active_streak"] = s.active_streak;
    j["requests_completed"] = s.requests_completed;
    return j;
}

WorldState state_from_json(const json& j) {
    WorldState s;
    s.battery_units = j.at("battery_units").get<BatteryUnits>();
    s.motor_temp = j.at("motor_temp").get<double>();
    s.location = j.at("location").get<LocationId>();
    s.floor = j.at("floor").get<int>();
    s.clock = j.at("clock").get<int>();
    s.mood = j.at("mood").get<double>();
    for (const auto& e : j.at("pending_events")) s.pending_events.push_back(event_from_json(e));
    s.charging = j.at("charging").get<bool>();
    if (!j.at("travel").is_null()) {
        const auto& tj = j["travel"];
        Travel t;
        t.action = action_from_json(tj.at("action"));
        const auto& legs = tj.at("legs");
        if (legs.size() > 3) throw std::invalid_argument("travel has too many legs");
        t.leg_count = static_cast<std::uint8_t>(legs.size());
        for (std::size_t i = 0; i < legs.size(); ++i) t.legs[i] = leg_from_json(legs[i]);
        t.leg_index = tj.at("leg_index").get<std::uint8_t>();
        t.remaining = tj.at("remaining").get<int>();
        t.ticks_done = tj.at("ticks_done").get<int>();
        t.fsm.phase = static_cast<ElevatorPhase>(tj.at("fsm_phase").get<int>());
        t.fsm.target_floor = tj.at("fsm_target_floor").get<int>();
        s.travel = t;
    }
    s.failure_ticks = j.at("failure_ticks").get<std::vector<int>>();
    s.active_streak = j.at("active_streak").get<int>();
    s.requests_completed = j.at("requests_completed").get<int>();
    return s;
}

json action_to_json(const Action& a, const Building& b) {
    json j = raw_action(a);
    if (a.is_move()) j["target_name"] = b.name(a.target);
    return j;
}

Action action_from_json(const json& j) {
    auto kind = parse_action_kind(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unknown action kind");
    Action a = Action::of(*kind);
    if (a.is_move()) {
        a.target = j.at("target").get<LocationId>();
        auto m = parse_method(j.at("method").get<std::string>());
        if (!m) throw std::invalid_argument("unknown method");
        a.method = *m;
    }
    validate_action(a);
    return a;
}

std::string action_to_text(const Action& a, const Building& b) {
    if (!a.is_move()) return std::string(to_string(a.kind));
    return "move_to(" + std::string(b.name(a.target)) + "," + std::string(to_string(a.method)) + ")";
}

json outcome_to_json(const StepOutcome& o) {
    json events = json::array();
    for (const auto& e : o.observation.new_events) events.push_back(event_to_json(e));
    return {{"post_state", state_to_json(o.post_state)},
            {"observation", {{"new_events", events}, {"note", o.observation.note}}},
            {"extrinsic_reward", o.extrinsic_reward},
            {"outcome", to_string(o.outcome)},
            {"resources",
             {{"time", o.resources.time},
              {"energy_units", o.resources.energy_units},
              {"charge_units", o.resources.charge_units}}},
            {"cause", o.cause},
            {"requests_completed", o.requests_completed}};
}

}  // namespace pepa
