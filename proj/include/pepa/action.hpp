#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pepa {

/// Index of a node in the building graph. Names live in the Building.
using LocationId = std::int16_t;
inline constexpr LocationId kNoLocation = -1;

/// The 19 discrete action kinds: idle, rest, eight locomotion primitives,
/// eight emotional expressions and the parameterised move_to.
enum class ActionKind : std::uint8_t {
    idle,
    rest,
    // locomotion primitives
    sit,
    lie_down,
    stretch,
    wander,
    trot,
    sniff_around,
    spin,
    jump,
    // emotional expressions
    express_happy,
    express_excited,
    dance,
    nuzzle,
    give_paw,
    cuddle,
    express_thinking,
    express_curious,
    // navigation
    move_to,
};

inline constexpr std::size_t kActionKindCount = 19;

enum class ActionClass : std::uint8_t { rest, locomotion, expression, navigation };

enum class Method : std::uint8_t { walk, elevator, stairs };

/// Reporting categories used for the behaviour tables.
enum class Category : std::uint8_t { Rest, Explore, Affection, Return, Think, PositiveEmotion };
inline constexpr std::size_t kCategoryCount = 6;

struct Action {
    ActionKind kind = ActionKind::idle;
    LocationId target = kNoLocation;  // move_to only
    Method method = Method::walk;     // move_to only

    static Action of(ActionKind k) { return Action{k, kNoLocation, Method::walk}; }
    static Action move(LocationId where, Method how) { return Action{ActionKind::move_to, where, how}; }

    bool is_move() const { return kind == ActionKind::move_to; }
    friend bool operator==(const Action&, const Action&) = default;
};

const std::array<ActionKind, kActionKindCount>& all_action_kinds();
const std::array<Category, kCategoryCount>& all_categories();

std::string_view to_string(ActionKind k);
std::string_view to_string(Method m);
std::string_view to_string(Category c);
std::string_view to_string(ActionClass c);

std::optional<ActionKind> parse_action_kind(std::string_view s);
std::optional<Method> parse_method(std::string_view s);
std::optional<Category> parse_category(std::string_view s);

ActionClass action_class(ActionKind k);

/// Throws std::invalid_argument when a move_to lacks a target or a
/// non-move action carries one.
void validate_action(const Action& a);

}  // namespace pepa
