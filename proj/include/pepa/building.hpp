#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pepa/action.hpp"
#include "pepa/sim_config.hpp"

namespace pepa {

/// One leg of a planned trip.
enum class LegKind : std::uint8_t { walk, elevator, stairs };

struct Leg {
    LegKind kind = LegKind::walk;
    LocationId end = kNoLocation;
    int ticks = 0;  // for the elevator leg this is the phase count
    friend bool operator==(const Leg&, const Leg&) = default;
};

/// Multi-floor building graph built from the configured node list.
class Building {
public:
    Building() = default;
    explicit Building(const std::vector<NodeSpec>& nodes);

    std::size_t size() const { return nodes_.size(); }
    const NodeSpec& node(LocationId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    std::string_view name(LocationId id) const { return node(id).name; }
    std::optional<LocationId> find(std::string_view name) const;

    LocationId home() const { return home_; }
    LocationId charger() const { return charger_; }
    std::optional<LocationId> elevator_on(int floor) const;
    std::optional<LocationId> stairs_on(int floor) const;
    int floor_of(LocationId id) const { return node(id).floor; }
    int floor_count() const { return floors_; }

    bool is_room(LocationId id) const;  // room, home or charger

    /// Legs from `from` to `to`; empty when `from == to`. Cross-floor trips
    /// use the connector selected by `method` (walk is rejected there).
    std::optional<std::vector<Leg>> route(LocationId from, LocationId to, Method method,
                                          int stairs_ticks_per_floor) const;

    /// Rooms ordered by floor then position (home and charger included).
    const std::vector<LocationId>& rooms() const { return rooms_; }

private:
    std::vector<NodeSpec> nodes_;
    std::vector<LocationId> rooms_;
    LocationId home_ = kNoLocation;
    LocationId charger_ = kNoLocation;
    int floors_ = 0;
};

}  // namespace pepa
