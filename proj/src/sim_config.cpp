#include "pepa/sim_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "pepa/errors.hpp"

namespace pepa {

using nlohmann::json;

namespace {

std::optional<NodeKind> parse_node_kind(std::string_view s) {
    if (s == "room") return NodeKind::room;
    if (s == "home") return NodeKind::home;
    if (s == "charger") return NodeKind::charger;
    if (s == "elevator") return NodeKind::elevator;
    if (s == "stairs") return NodeKind::stairs;
    return std::nullopt;
}

bool representable(double percent) {
    const double scaled = percent * kBatteryScale;
    return std::isfinite(scaled) && std::fabs(scaled - std::round(scaled)) < 1e-6;
}

void require_cost(const char* field, double v) {
    if (!std::isfinite(v) || v < 0) throw ConfigError(field, "must be a finite value >= 0");
    if (!representable(v)) throw ConfigError(field, "must be a multiple of 0.0001 percent");
}

void require_prob(const char* field, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field, "must be a probability in [0,1]");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(key, e.what());
        }
    }
}

}  // namespace

BatteryUnits to_battery_units(double percent) {
    return static_cast<BatteryUnits>(std::llround(percent * kBatteryScale));
}

std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::room: return "room";
        case NodeKind::home: return "home";
        case NodeKind::charger: return "charger";
        case NodeKind::elevator: return "elevator";
        case NodeKind::stairs: return "stairs";
    }
    return "room";
}

std::string_view to_string(EventCategory c) {
    switch (c) {
        case EventCategory::exploration_request: return "exploration_request";
        case EventCategory::affection_request: return "affection_request";
        case EventCategory::task_request: return "task_request";
    }
    return "exploration_request";
}

std::optional<EventCategory> parse_event_category(std::string_view s) {
    if (s == "exploration_request") return EventCategory::exploration_request;
    if (s == "affection_request") return EventCategory::affection_request;
    if (s == "task_request") return EventCategory::task_request;
    return std::nullopt;
}

SimConfig SimConfig::defaults() {
    SimConfig cfg;
    for (int floor = 1; floor <= 3; ++floor) {
        const std::string f = std::to_string(floor);
        cfg.nodes.push_back({"elevator_" + f, floor, 0, NodeKind::elevator});
        cfg.nodes.push_back({"stairs_" + f, floor, 2, NodeKind::stairs});
        for (int r = 1; r <= 4; ++r) {
            const bool is_home = floor == 1 && r == 1;
            std::string name = is_home ? "home" : "room_" + f + "0" + std::to_string(r);
            cfg.nodes.push_back({name, floor, 4 * r, is_home ? NodeKind::home : NodeKind::room});
            if (is_home) cfg.nodes.push_back({"charger", 1, 10, NodeKind::charger});
        }
    }
    cfg.generator = EventGenerator{};
    return cfg;
}

void validate(const SimConfig& cfg) {
    if (cfg.rng != "mt19937_64") throw ConfigError("rng", "unsupported generator '" + cfg.rng + "'");
    require_cost("cost_rest_per_tick", cfg.cost_rest_per_tick);
    require_cost("cost_expression", cfg.cost_expression);
    require_cost("cost_locomotion", cfg.cost_locomotion);
    require_cost("cost_walk_per_tick", cfg.cost_walk_per_tick);
    require_cost("cost_elevator_per_tick", cfg.cost_elevator_per_tick);
    require_cost("cost_stairs_per_tick", cfg.cost_stairs_per_tick);
    require_cost("charge_rate", cfg.charge_rate);
    if (!std::isfinite(cfg.ambient_temp)) throw ConfigError("ambient_temp", "must be finite");
    if (cfg.heat_locomotion < 0) throw ConfigError("heat_locomotion", "must be >= 0");
    if (cfg.heat_expression < 0) throw ConfigError("heat_expression", "must be >= 0");
    if (cfg.heat_travel < 0) throw ConfigError("heat_travel", "must be >= 0");
    if (!(cfg.cooling_fraction > 0 && cfg.cooling_fraction <= 1))
        throw ConfigError("cooling_fraction", "must be in (0,1]");
    if (!(cfg.overheat_temp > cfg.ambient_temp))
        throw ConfigError("overheat_temp", "must exceed ambient_temp");
    require_prob("action_failure_prob", cfg.action_failure_prob);
    require_prob("overheat_failure_prob", cfg.overheat_failure_prob);
    require_prob("walk_failure_prob", cfg.walk_failure_prob);
    require_prob("elevator_phase_failure_prob", cfg.elevator_phase_failure_prob);
    require_prob("stairs_failure_prob", cfg.stairs_failure_prob);
    if (cfg.stairs_ticks_per_floor < 1) throw ConfigError("stairs_ticks_per_floor", "must be >= 1");
    if (cfg.event_timeout < 1) throw ConfigError("event_timeout", "must be >= 1");
    if (cfg.failure_window < 1) throw ConfigError("failure_window", "must be >= 1");
    for (double v : {cfg.mood_decay_per_tick, cfg.mood_gain_affection, cfg.mood_gain_positive,
                     cfg.mood_gain_explore, cfg.mood_gain_request, cfg.mood_loss_failure})
        if (!(v >= 0 && v <= 2)) throw ConfigError("mood", "mood rates must be in [0,2]");
    if (!std::isfinite(cfg.reward_request_completed))
        throw ConfigError("reward_request_completed", "must be finite");
    if (!std::isfinite(cfg.reward_episode_failure))
        throw ConfigError("reward_episode_failure", "must be finite");

    if (cfg.nodes.empty()) throw ConfigError("nodes", "building graph is empty");
    std::set<std::string> names;
    int homes = 0, chargers = 0;
    std::set<int> floors, elevators, stairs;
    for (const auto& n : cfg.nodes) {
        if (n.name.empty()) throw ConfigError("nodes", "node with empty name");
        if (!names.insert(n.name).second) throw ConfigError("nodes", "duplicate node '" + n.name + "'");
        if (n.name.find(' ') != std::string::npos)
            throw ConfigError("nodes", "node names must be single tokens: '" + n.name + "'");
        floors.insert(n.floor);
        homes += n.kind == NodeKind::home;
        chargers += n.kind == NodeKind::charger;
        if (n.kind == NodeKind::elevator && !elevators.insert(n.floor).second)
            throw ConfigError("nodes", "two elevator nodes on floor " + std::to_string(n.floor));
        if (n.kind == NodeKind::stairs && !stairs.insert(n.floor).second)
            throw ConfigError("nodes", "two stair nodes on floor " + std::to_string(n.floor));
    }
    if (chargers != 1) throw ConfigError("nodes.charger", "exactly one charger node is required");
    if (homes != 1) throw ConfigError("nodes.home", "exactly one home node is required");
    for (const auto& n : cfg.nodes) {
        if (n.kind == NodeKind::charger) {
            for (const auto& h : cfg.nodes)
                if (h.kind == NodeKind::home && h.floor != n.floor)
                    throw ConfigError("nodes.charger", "charger must be on the home floor");
        }
    }
    if (floors.size() > 1) {
        for (int f : floors)
            if (!elevators.count(f) || !stairs.count(f))
                throw ConfigError("nodes", "floor " + std::to_string(f) + " lacks an elevator or stairs node");
    }
    for (const auto& e : cfg.schedule) {
        if (e.tick < 0 || e.tick > 1440) throw ConfigError("schedule", "event tick outside [0,1440]");
        if (e.category != EventCategory::affection_request &&
            (e.target < 0 || static_cast<std::size_t>(e.target) >= cfg.nodes.size()))
            throw ConfigError("schedule", "event target is not a node");
    }
    if (cfg.generator) {
        const auto& g = *cfg.generator;
        if (g.requests_per_hour < 0) throw ConfigError("generator.requests_per_hour", "must be >= 0");
        if (g.first_tick < 0 || g.last_tick > 1440 || g.first_tick > g.last_tick)
            throw ConfigError("generator.first_tick", "window must lie inside [0,1440]");
        if (g.exploration_share < 0 || g.affection_share < 0 || g.exploration_share + g.affection_share > 1)
            throw ConfigError("generator.exploration_share", "shares must be nonnegative and sum to <= 1");
    }
}

SimConfig sim_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("<root>", "config must be an object");
    SimConfig cfg;
    cfg.nodes.clear();
    read(j, "rng", cfg.rng);
    read(j, "cost_rest_per_tick", cfg.cost_rest_per_tick);
    read(j, "cost_expression", cfg.cost_expression);
    read(j, "cost_locomotion", cfg.cost_locomotion);
    read(j, "cost_walk_per_tick", cfg.cost_walk_per_tick);
    read(j, "cost_elevator_per_tick", cfg.cost_elevator_per_tick);
    read(j, "cost_stairs_per_tick", cfg.cost_stairs_per_tick);
    read(j, "charge_rate", cfg.charge_rate);
    read(j, "ambient_temp", cfg.ambient_temp);
    read(j, "heat_locomotion", cfg.heat_locomotion);
    read(j, "heat_expression", cfg.heat_expression);
    read(j, "heat_travel", cfg.heat_travel);
    read(j, "cooling_fraction", cfg.cooling_fraction);
    read(j, "overheat_temp", cfg.overheat_temp);
    read(j, "action_failure_prob", cfg.action_failure_prob);
    read(j, "overheat_failure_prob", cfg.overheat_failure_prob);
    read(j, "walk_failure_prob", cfg.walk_failure_prob);
    read(j, "elevator_phase_failure_prob", cfg.elevator_phase_failure_prob);
    read(j, "stairs_failure_prob", cfg.stairs_failure_prob);
    read(j, "stairs_ticks_per_floor", cfg.stairs_ticks_per_floor);
    read(j, "mood_decay_per_tick", cfg.mood_decay_per_tick);
    read(j, "mood_gain_affection", cfg.mood_gain_affection);
    read(j, "mood_gain_positive", cfg.mood_gain_positive);
    read(j, "mood_gain_explore", cfg.mood_gain_explore);
    read(j, "mood_gain_request", cfg.mood_gain_request);
    read(j, "mood_loss_failure", cfg.mood_loss_failure);
    read(j, "reward_request_completed", cfg.reward_request_completed);
    read(j, "reward_episode_failure", cfg.reward_episode_failure);
    read(j, "event_timeout", cfg.event_timeout);
    read(j, "failure_window", cfg.failure_window);

    if (!j.contains("nodes") || !j["nodes"].is_array()) throw ConfigError("nodes", "missing node list");
    for (const auto& n : j["nodes"]) {
        NodeSpec spec;
        try {
            spec.name = n.at("name").get<std::string>();
            spec.floor = n.at("floor").get<int>();
            spec.x = n.at("x").get<int>();
            auto kind = parse_node_kind(n.at("kind").get<std::string>());
            if (!kind) throw ConfigError("nodes.kind", "unknown node kind");
            spec.kind = *kind;
        } catch (const json::exception& e) {
            throw ConfigError("nodes", e.what());
        }
        cfg.nodes.push_back(std::move(spec));
    }
    auto node_index = [&](const std::string& name) -> LocationId {
        for (std::size_t i = 0; i < cfg.nodes.size(); ++i)
            if (cfg.nodes[i].name == name) return static_cast<LocationId>(i);
        throw ConfigError("schedule.target", "unknown location '" + name + "'");
    };
    if (auto it = j.find("schedule"); it != j.end()) {
        for (const auto& e : *it) {
            UserEvent ev;
            try {
                ev.tick = e.at("tick").get<int>();
                ev.text = e.at("text").get<std::string>();
                auto cat = parse_event_category(e.at("category").get<std::string>());
                if (!cat) throw ConfigError("schedule.category", "unknown event category");
                ev.category = *cat;
                if (e.contains("target") && !e["target"].is_null()) ev.target = node_index(e["target"]);
                if (e.contains("method") && !e["method"].is_null()) {
                    auto m = parse_method(e["method"].get<std::string>());
                    if (!m) throw ConfigError("schedule.method", "unknown method");
                    ev.method = *m;
                }
            } catch (const json::exception& ex) {
                throw ConfigError("schedule", ex.what());
            }
            cfg.schedule.push_back(std::move(ev));
        }
    }
    if (auto it = j.find("generator"); it != j.end() && !it->is_null()) {
        EventGenerator g;
        read(*it, "requests_per_hour", g.requests_per_hour);
        read(*it, "first_tick", g.first_tick);
        read(*it, "last_tick", g.last_tick);
        read(*it, "exploration_share", g.exploration_share);
        read(*it, "affection_share", g.affection_share);
        cfg.generator = g;
    }
    validate(cfg);
    return cfg;
}

json to_json(const SimConfig& cfg) {
    json j;
    j["rng"] = cfg.rng;
    j["cost_rest_per_tick"] = cfg.cost_rest_per_tick;
    j["cost_expression"] = cfg.cost_expression;
    j["cost_locomotion"] = cfg.cost_locomotion;
    j["cost_walk_per_tick"] = cfg.cost_walk_per_tick;
    j["cost_elevator_per_tick"] = cfg.cost_elevator_per_tick;
    j["cost_stairs_per_tick"] = cfg.cost_stairs_per_tick;
    j["charge_rate"] = cfg.charge_rate;
    j["ambient_temp"] = cfg.ambient_temp;
    j["heat_locomotion"] = cfg.heat_locomotion;
    j["heat_expression"] = cfg.heat_expression;
    j["heat_travel"] = cfg.heat_travel;
    j["cooling_fraction"] = cfg.cooling_fraction;
    j["overheat_temp"] = cfg.overheat_temp;
    j["action_failure_prob"] = cfg.action_failure_prob;
    j["overheat_failure_prob"] = cfg.overheat_failure_prob;
    j["walk_failure_prob"] = cfg.walk_failure_prob;
    j["elevator_phase_failure_prob"] = cfg.elevator_phase_failure_prob;
    j["stairs_failure_prob"] = cfg.stairs_failure_prob;
    j["stairs_ticks_per_floor"] = cfg.stairs_ticks_per_floor;
    j["mood_decay_per_tick"] = cfg.mood_decay_per_tick;
    j["mood_gain_affection"] = cfg.mood_gain_affection;
    j["mood_gain_positive"] = cfg.mood_gain_positive;
    j["mood_gain_explore"] = cfg.mood_gain_explore;
    j["mood_gain_request"] = cfg.mood_gain_request;
    j["mood_loss_failure"] = cfg.mood_loss_failure;
    j["reward_request_completed"] = cfg.reward_request_completed;
    j["reward_episode_failure"] = cfg.reward_episode_failure;
    j["event_timeout"] = cfg.event_timeout;
    j["failure_window"] = cfg.failure_window;
    j["nodes"] = json::array();
    for (const auto& n : cfg.nodes)
        j["nodes"].push_back({{"name", n.name}, {"floor", n.floor}, {"x", n.x}, {"kind", to_string(n.kind)}});
    j["schedule"] = json::array();
    for (const auto& e : cfg.schedule) {
        json ev{{"tick", e.tick}, {"text", e.text}, {"category", to_string(e.category)}};
        ev["target"] = e.target == kNoLocation ? json(nullptr) : json(cfg.nodes.at(e.target).name);
        ev["method"] = e.method ? json(to_string(*e.method)) : json(nullptr);
        j["schedule"].push_back(ev);
    }
    if (cfg.generator) {
        const auto& g = *cfg.generator;
        j["generator"] = {{"requests_per_hour", g.requests_per_hour}, {"first_tick", g.first_tick},
                          {"last_tick", g.last_tick}, {"exploration_share", g.exploration_share},
                          {"affection_share", g.affection_share}};
    } else {
        j["generator"] = nullptr;
    }
    return j;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("path", "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("path", path.string() + ": " + e.what());
    }
    return sim_config_from_json(j);
}

}  // namespace pepa
