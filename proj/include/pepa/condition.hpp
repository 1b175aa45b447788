#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pepa/building.hpp"
#include "pepa/world.hpp"

namespace pepa {

/// Reported with the byte offset of the offending token.
class ConditionParseError : public std::runtime_error {
public:
    ConditionParseError(std::size_t pos, const std::string& what)
        : std::runtime_error("condition parse error at " + std::to_string(pos) + ": " + what), pos_(pos) {}
    std::size_t position() const noexcept { return pos_; }

private:
    std::size_t pos_;
};

enum class Field : std::uint8_t {
    // numeric
    battery, temp, clock, mood, floor, recent_failures, active_streak, pending,
    // symbolic
    category, kind, command, target, method, location,
    // boolean
    at_home, at_charger, charging, serves_command, command_pending, is_move,
};

inline constexpr std::size_t kFieldCount = static_cast<std::size_t>(Field::is_move) + 1;

/// Everything a condition may read, computed once per (state, action).
/// Booleans are stored as 0/1 and symbols as their integer id.
struct Facts {
    std::array<double, kFieldCount> v{};

    double operator[](Field f) const { return v[static_cast<std::size_t>(f)]; }
    double& operator[](Field f) { return v[static_cast<std::size_t>(f)]; }
    bool flag(Field f) const { return (*this)[f] != 0.0; }
};

Facts make_facts(const WorldState& s, const Action& a, const Building& b);
/// The action-independent part of make_facts, for scoring many actions from one state.
Facts state_facts(const WorldState& s, const Building& b);
void bind_action(Facts& f, const WorldState& s, const Action& a, const Building& b);

/// Compiled condition. Location names are resolved against the building at
/// compile time, so a Condition is tied to one building layout.
class Condition {
public:
    /// Parses and type-checks `text`. Throws ConditionParseError.
    static Condition compile(std::string_view text, const Building& building);

    bool eval(const Facts& f) const;
    /// A condition is split into top-level conjuncts that read only
    /// state fields and those that read the action. eval(f) equals
    /// eval_state(f) && eval_action(f).
    bool eval_state(const Facts& f) const;
    bool eval_action(const Facts& f) const;
    bool state_only() const { return action_conj_.empty(); }
    const std::string& text() const { return text_; }
    const std::set<Field>& fields() const { return fields_; }
    bool references(Field f) const { return fields_.count(f) != 0; }

    struct Node {
        enum class Op : std::uint8_t { lt, le, gt, ge, eq, ne, and_, or_, not_, field_true, constant };
        Op op = Op::constant;
        Field field = Field::battery;
        double number = 0;  // numeric operand or symbolic id
        int lhs = -1, rhs = -1;
        bool value = true;  // for constants
    };

private:
    bool eval_node(int idx, const Facts& f) const;
    bool reads_action(int idx) const;
    void split_conjuncts();

    std::string text_;
    std::vector<Node> nodes_;
    int root_ = -1;
    std::set<Field> fields_;
    std::vector<int> state_conj_, action_conj_;

    friend class ConditionParser;
};

}  // namespace pepa
