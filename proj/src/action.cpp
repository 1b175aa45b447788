#include "pepa/action.hpp"

#include <stdexcept>

namespace pepa {

namespace {

constexpr std::array<std::string_view, kActionKindCount> kKindNames = {
    "idle",          "rest",           "sit",   "lie_down", "stretch",  "wander",
    "trot",          "sniff_around",   "spin",  "jump",     "express_happy",
    "express_excited", "dance",        "nuzzle", "give_paw", "cuddle", "express_thinking",
    "express_curious", "move_to",
};

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "Rest", "Explore", "Affection", "Return", "Think", "PositiveEmotion",
};

}  // namespace

const std::array<ActionKind, kActionKindCount>& all_action_kinds() {
    static const auto kinds = [] {
        std::array<ActionKind, kActionKindCount> out{};
        for (std::size_t i = 0; i < kActionKindCount; ++i) out[i] = static_cast<ActionKind>(i);
        return out;
    }();
    return kinds;
}

const std::array<Category, kCategoryCount>& all_categories() {
    static const std::array<Category, kCategoryCount> cats = {
        Category::Rest,   Category::Explore, Category::Affection,
        Category::Return, Category::Think,   Category::PositiveEmotion,
    };
    return cats;
}

std::string_view to_string(ActionKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::string_view to_string(Method m) {
    switch (m) {
        case Method::walk: return "walk";
        case Method::elevator: return "elevator";
        case Method::stairs: return "stairs";
    }
    return "walk";
}

std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::string_view to_string(ActionClass c) {
    switch (c) {
        case ActionClass::rest: return "rest";
        case ActionClass::locomotion: return "locomotion";
        case ActionClass::expression: return "expression";
        case ActionClass::navigation: return "navigation";
    }
    return "rest";
}

std::optional<ActionKind> parse_action_kind(std::string_view s) {
    for (std::size_t i = 0; i < kActionKindCount; ++i)
        if (kKindNames[i] == s) return static_cast<ActionKind>(i);
    return std::nullopt;
}

std::optional<Method> parse_method(std::string_view s) {
    if (s == "walk") return Method::walk;
    if (s == "elevator") return Method::elevator;
    if (s == "stairs") return Method::stairs;
    return std::nullopt;
}

std::optional<Category> parse_category(std::string_view s) {
    for (std::size_t i = 0; i < kCategoryCount; ++i)
        if (kCategoryNames[i] == s) return static_cast<Category>(i);
    return std::nullopt;
}

ActionClass action_class(ActionKind k) {
    switch (k) {
        case ActionKind::idle:
        case ActionKind::rest:
            return ActionClass::rest;
        case ActionKind::sit:
        case ActionKind::lie_down:
        case ActionKind::stretch:
        case ActionKind::wander:
        case ActionKind::trot:
        case ActionKind::sniff_around:
        case ActionKind::spin:
        case ActionKind::jump:
            return ActionClass::locomotion;
        case ActionKind::move_to:
            return ActionClass::navigation;
        default:
            return ActionClass::expression;
    }
}

void validate_action(const Action& a) {
    if (a.is_move() && a.target == kNoLocation)
        throw std::invalid_argument("move_to requires a target location");
    if (!a.is_move() && a.target != kNoLocation)
        throw std::invalid_argument(std::string(to_string(a.kind)) + " takes no payload");
}

}  // namespace pepa
