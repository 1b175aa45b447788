#include "pepa/building.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

namespace pepa {

Building::Building(const std::vector<NodeSpec>& nodes) : nodes_(nodes) {
    std::set<int> floors;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto id = static_cast<LocationId>(i);
        floors.insert(nodes_[i].floor);
        if (nodes_[i].kind == NodeKind::home) home_ = id;
        if (nodes_[i].kind == NodeKind::charger) charger_ = id;
        if (is_room(id)) rooms_.push_back(id);
    }
    floors_ = static_cast<int>(floors.size());
    std::stable_sort(rooms_.begin(), rooms_.end(), [&](LocationId a, LocationId b) {
        const auto& na = node(a);
        const auto& nb = node(b);
        return na.floor != nb.floor ? na.floor < nb.floor : na.x < nb.x;
    });
}

std::optional<LocationId> Building::find(std::string_view name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].name == name) return static_cast<LocationId>(i);
    return std::nullopt;
}

std::optional<LocationId> Building::elevator_on(int floor) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].kind == NodeKind::elevator && nodes_[i].floor == floor) return static_cast<LocationId>(i);
    return std::nullopt;
}

std::optional<LocationId> Building::stairs_on(int floor) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].kind == NodeKind::stairs && nodes_[i].floor == floor) return static_cast<LocationId>(i);
    return std::nullopt;
}

bool Building::is_room(LocationId id) const {
    const auto k = node(id).kind;
    return k == NodeKind::room || k == NodeKind::home || k == NodeKind::charger;
}

std::optional<std::vector<Leg>> Building::route(LocationId from, LocationId to, Method method,
                                                int stairs_ticks_per_floor) const {
    std::vector<Leg> legs;
    if (from == to) return legs;
    const auto& a = node(from);
    const auto& b = node(to);
    auto walk = [&](const NodeSpec& p, const NodeSpec& q, LocationId end) {
        const int d = std::abs(p.x - q.x);
        legs.push_back({LegKind::walk, end, std::max(d, 1)});
    };
    if (a.floor == b.floor) {
        walk(a, b, to);
        return legs;
    }
    if (method == Method::walk) return std::nullopt;
    const auto out = method == Method::elevator ? elevator_on(a.floor) : stairs_on(a.floor);
    const auto in = method == Method::elevator ? elevator_on(b.floor) : stairs_on(b.floor);
    if (!out || !in) return std::nullopt;
    if (from != *out) walk(a, node(*out), *out);
    if (method == Method::elevator) {
        legs.push_back({LegKind::elevator, *in, 4});
    } else {
        legs.push_back({LegKind::stairs, *in, stairs_ticks_per_floor * std::abs(a.floor - b.floor)});
    }
    if (*in != to) walk(node(*in), b, to);
    return legs;
}

}  // namespace pepa
