#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pepa/reward.hpp"
#include "pepa/rng.hpp"

using namespace pepa;

namespace {

struct Fixture : ::testing::Test {
    World world{SimConfig::defaults()};
    const Building& b = world.building();
    WorldState s = world.reset(7);

    LocationId id(const char* name) const { return *b.find(name); }
    bool holds(const char* text, const WorldState& st, const Action& a) const {
        return Condition::compile(text, b).eval(make_facts(st, a, b));
    }
};

RewardRule rule(std::string id, std::string cond, double w, Provenance p = Provenance::personality_preference) {
    return RewardRule{std::move(id), std::move(cond), w, p};
}

}  // namespace

// --- condition language ---------------------------------------------------

TEST_F(Fixture, ComparisonsOnNumericFields) {
    s.battery_units = to_battery_units(15.0);
    EXPECT_TRUE(holds("battery < 20", s, Action::of(ActionKind::idle)));
    EXPECT_FALSE(holds("battery >= 20", s, Action::of(ActionKind::idle)));
    EXPECT_TRUE(holds("battery <= 15 and battery >= 15", s, Action::of(ActionKind::idle)));
    EXPECT_TRUE(holds("clock == 0", s, Action::of(ActionKind::idle)));
    EXPECT_TRUE(holds("mood > 0.25", s, Action::of(ActionKind::idle)));
}

TEST_F(Fixture, SymbolicFieldsResolveNames) {
    const Action go = Action::move(id("room_302"), Method::elevator);
    EXPECT_TRUE(holds("target == room_302 and method == elevator", s, go));
    EXPECT_TRUE(holds("category == Explore", s, go));
    EXPECT_TRUE(holds("location == home", s, go));
    EXPECT_TRUE(holds("kind == move_to and is_move", s, go));
    EXPECT_FALSE(holds("method == stairs", s, go));
    EXPECT_TRUE(holds("category == Rest", s, Action::of(ActionKind::lie_down)));
    EXPECT_TRUE(holds("target == none and method == none", s, Action::of(ActionKind::idle)));
    EXPECT_TRUE(holds("command == none and not command_pending", s, Action::of(ActionKind::idle)));
}

TEST_F(Fixture, BooleanOperatorsAndPrecedence) {
    const Action a = Action::of(ActionKind::idle);
    EXPECT_TRUE(holds("true or false and false", s, a));
    EXPECT_FALSE(holds("(true or false) and false", s, a));
    EXPECT_TRUE(holds("not not at_home", s, a));
    EXPECT_TRUE(holds("at_charger == false", s, a));
    EXPECT_TRUE(holds("at_home != false", s, a));
}

TEST_F(Fixture, CommandFactsFollowPendingEvent) {
    s.pending_events.push_back(UserEvent{0, "go to room_203", EventCategory::exploration_request, id("room_203"), {}});
    const Action go = Action::move(id("room_203"), Method::elevator);
    EXPECT_TRUE(holds("command_pending and command == exploration_request", s, go));
    EXPECT_TRUE(holds("serves_command", s, go));
    EXPECT_FALSE(holds("serves_command", s, Action::of(ActionKind::idle)));
}

TEST_F(Fixture, ParseErrorsReportPosition) {
    auto err_at = [&](const char* text) -> std::size_t {
        try {
            Condition::compile(text, b);
        } catch (const ConditionParseError& e) {
            return e.position();
        }
        ADD_FAILURE() << "no error for: " << text;
        return 0;
    };
    EXPECT_EQ(err_at("battery < banana"), 10u);
    EXPECT_EQ(err_at("wattage > 3"), 0u);
    EXPECT_EQ(err_at("category == Flying"), 12u);
    EXPECT_EQ(err_at("target < home"), 7u);
    EXPECT_EQ(err_at("(battery < 3"), 12u);
    EXPECT_EQ(err_at("battery < 3 battery"), 12u);
    EXPECT_EQ(err_at("battery = 3"), 8u);
    EXPECT_EQ(err_at("location == room_999"), 12u);
    EXPECT_EQ(err_at(""), 0u);
}

TEST_F(Fixture, FieldsAreTracked) {
    const auto c = Condition::compile("battery < 40 and category != Rest", b);
    EXPECT_TRUE(c.references(Field::battery));
    EXPECT_TRUE(c.references(Field::category));
    EXPECT_FALSE(c.references(Field::temp));
}

// --- evaluate_intrinsic ---------------------------------------------------

TEST_F(Fixture, EmptySpecIsZero) {
    CompiledSpec spec(RewardSpec{}, b);
    EXPECT_EQ(evaluate_intrinsic(spec, s, Action::of(ActionKind::dance), b), 0.0);
}

TEST_F(Fixture, SingleMatchingPenalty) {
    RewardSpec raw{0, {rule("rest", "category == Rest", 0.5),
                       rule("low_move", "battery < 20 and is_move", -1.0, Provenance::constraint_penalty)}};
    CompiledSpec spec(raw, b);
    s.battery_units = to_battery_units(15.0);
    EXPECT_EQ(evaluate_intrinsic(spec, s, Action::move(id("room_203"), Method::elevator), b), -1.0);
    EXPECT_EQ(evaluate_intrinsic(spec, s, Action::of(ActionKind::rest), b), 0.5);
    EXPECT_EQ(spec.matching(make_facts(s, Action::of(ActionKind::rest), b)), std::vector<std::string>{"rest"});
}

TEST(TotalReward, Additive) {
    EXPECT_EQ(total_reward(0.3, 0.7), 0.3 + 0.7);
    EXPECT_DOUBLE_EQ(total_reward(0.3, 0.7), 1.0);
    EXPECT_EQ(total_reward(-1.0, 1.0), 0.0);
    EXPECT_EQ(total_reward(-2.5, 0.0), -2.5);
    EXPECT_THROW(total_reward(std::numeric_limits<double>::quiet_NaN(), 0.0), NumericError);
    EXPECT_THROW(total_reward(0.0, std::numeric_limits<double>::infinity()), NumericError);
}

// --- validate_spec --------------------------------------------------------

TEST_F(Fixture, DuplicateIdIsNamed) {
    RewardSpec raw{0, {rule("rest", "category == Rest", 0.5), rule("rest", "category == Think", 0.1)}};
    try {
        validate_spec(raw, b);
        FAIL();
    } catch (const SpecError& e) {
        ASSERT_EQ(e.diagnostics().size(), 1u);
        EXPECT_NE(e.diagnostics()[0].find("'rest'"), std::string::npos);
    }
}

TEST_F(Fixture, DiagnosticsPerRule) {
    RewardSpec raw{0, {rule("a", "battery < banana", 1.0), rule("b", "category == Rest", NAN),
                       rule("c", "category == Rest", 1.0)}};
    try {
        validate_spec(raw, b);
        FAIL();
    } catch (const SpecError& e) {
        ASSERT_EQ(e.diagnostics().size(), 2u);
        EXPECT_NE(e.diagnostics()[0].find("rule 'a'"), std::string::npos);
        EXPECT_NE(e.diagnostics()[1].find("rule 'b'"), std::string::npos);
    }
    EXPECT_THROW(CompiledSpec(raw, b), SpecError);
}

// --- apply_patch ----------------------------------------------------------

TEST(ApplyPatch, SetWeight) {
    const RewardSpec v0{0, {rule("rest", "category == Rest", 0.5)}};
    const RewardSpec v1 = apply_patch(v0, {0, {RewardEdit::set_weight("rest", 1.0)}});
    EXPECT_EQ(v1.version, 1);
    EXPECT_EQ(v1.find("rest")->weight, 1.0);
    EXPECT_EQ(v0.find("rest")->weight, 0.5);
}

TEST(ApplyPatch, StaleBase) {
    const RewardSpec v0{0, {rule("rest", "category == Rest", 0.5)}};
    EXPECT_THROW(apply_patch(v0, {3, {}}), StalePatchError);
}

TEST(ApplyPatch, AddRedLine) {
    const RewardSpec v0{0, {rule("rest", "category == Rest", 0.5)}};
    const auto red = rule("red_line", "battery < 40 and category != Rest", -2.0, Provenance::constraint_penalty);
    const RewardSpec v1 = apply_patch(v0, {0, {RewardEdit::add(red)}});
    ASSERT_NE(v1.find("red_line"), nullptr);
    EXPECT_EQ(*v1.find("red_line"), red);
    EXPECT_EQ(v1.rules.size(), 2u);
}

TEST(ApplyPatch, UnknownIdAndOrder) {
    const RewardSpec v0{0, {rule("rest", "category == Rest", 0.5)}};
    EXPECT_THROW(apply_patch(v0, {0, {RewardEdit::scale("xyz", 2.0)}}), PatchError);
    EXPECT_THROW(apply_patch(v0, {0, {RewardEdit::add(rule("rest", "true", 1.0))}}), PatchError);
    // scale then set differs from set then scale
    const auto a = apply_patch(v0, {0, {RewardEdit::scale("rest", 2.0), RewardEdit::set_weight("rest", 3.0)}});
    const auto c = apply_patch(v0, {0, {RewardEdit::set_weight("rest", 3.0), RewardEdit::scale("rest", 2.0)}});
    EXPECT_EQ(a.find("rest")->weight, 3.0);
    EXPECT_EQ(c.find("rest")->weight, 6.0);
    const auto d = apply_patch(v0, {0, {RewardEdit::remove("rest")}});
    EXPECT_TRUE(d.rules.empty());
    EXPECT_THROW(apply_patch(d, {1, {RewardEdit::remove("rest")}}), PatchError);
}

TEST(Serialization, RoundTripAndStrictness) {
    const RewardSpec spec{4, {rule("rest", "category == Rest", 0.1 + 0.2),
                              rule("pen", "temp >= 65", -1.25, Provenance::constraint_penalty)}};
    EXPECT_EQ(spec_from_json(to_json(spec)), spec);
    EXPECT_EQ(canonical(spec_from_json(nlohmann::json::parse(canonical(spec)))), canonical(spec));

    const RewardPatch patch{4, {RewardEdit::add(rule("x", "true", 1.0, Provenance::memory_adjustment)),
                                RewardEdit::scale("rest", 1.5), RewardEdit::set_weight("pen", -2.0),
                                RewardEdit::remove("x")}};
    EXPECT_EQ(patch_from_json(to_json(patch)), patch);

    auto j = to_json(spec);
    j["extra"] = 1;
    EXPECT_THROW(spec_from_json(j), std::invalid_argument);
    auto pj = to_json(patch);
    pj["edits"][1]["factor"] = "big";
    EXPECT_THROW(patch_from_json(pj), std::invalid_argument);
}

TEST_F(Fixture, BatteryMassCountsBatteryRules) {
    const RewardSpec spec{0, {rule("rest", "category == Rest", 0.5),
                              rule("red", "battery < 35 and category != Rest", -2.0, Provenance::constraint_penalty),
                              rule("ret", "battery < 50 and target == home", 1.0, Provenance::goal_incentive)}};
    EXPECT_EQ(battery_conservation_mass(spec, b), 3.0);
}

// --- properties -----------------------------------------------------------

namespace {

const char* kAtoms[] = {
    "battery < 40", "battery >= 70", "temp > 45", "clock >= 600", "mood < 0.3", "category == Rest",
    "category == Explore", "category != Affection", "is_move", "at_home", "command_pending",
    "method == elevator", "target == home", "serves_command", "recent_failures >= 2", "floor == 2",
};

std::string random_condition(Rng& rng) {
    std::string c = kAtoms[rng.below(std::size(kAtoms))];
    const auto extra = rng.below(3);
    for (std::uint64_t i = 0; i < extra; ++i) {
        c += rng.bernoulli(0.5) ? " and " : " or ";
        if (rng.bernoulli(0.3)) c += "not ";
        c += kAtoms[rng.below(std::size(kAtoms))];
    }
    return c;
}

}  // namespace

TEST_F(Fixture, IntrinsicMatchesBruteForceAndIsPure) {
    Rng rng(2024);
    const auto kinds = all_action_kinds();
    const auto& rooms = b.rooms();
    for (int trial = 0; trial < 1000; ++trial) {
        RewardSpec raw;
        const auto n = rng.below(6);
        for (std::uint64_t i = 0; i < n; ++i)
            raw.rules.push_back(rule("r" + std::to_string(i), random_condition(rng), rng.uniform() * 4 - 2));
        const CompiledSpec spec(raw, b);

        WorldState st = s;
        st.battery_units = static_cast<BatteryUnits>(rng.below(kBatteryFull + 1));
        st.motor_temp = 25 + rng.uniform() * 50;
        st.clock = static_cast<int>(rng.below(1440));
        st.mood = rng.uniform() * 2 - 1;
        st.location = rooms[rng.below(rooms.size())];
        st.floor = b.floor_of(st.location);
        ActionKind k = kinds[rng.below(kinds.size())];
        Action a = k == ActionKind::move_to
                       ? Action::move(rooms[rng.below(rooms.size())], static_cast<Method>(rng.below(3)))
                       : Action::of(k);

        const double v = evaluate_intrinsic(spec, st, a, b);
        double expect = 0.0;
        for (const auto& r : raw.rules)
            if (Condition::compile(r.condition, b).eval(make_facts(st, a, b))) expect += r.weight;
        ASSERT_EQ(v, expect) << "trial " << trial;
        ASSERT_EQ(evaluate_intrinsic(spec, st, a, b), v);

        const double ext = rng.uniform() * 2 - 1;
        ASSERT_EQ(total_reward(v, ext), v + ext);
        ASSERT_EQ(total_reward(v, 0.0), v);
    }
}

TEST_F(Fixture, PatchReplayIsByteIdentical) {
    Rng rng(5);
    RewardSpec spec{0, {rule("rest", "category == Rest", 0.5)}};
    std::vector<RewardPatch> patches;
    for (int i = 0; i < 20; ++i) {
        RewardPatch p{spec.version, {}};
        const std::string nid = "r" + std::to_string(i);
        p.edits.push_back(RewardEdit::add(rule(nid, random_condition(rng), rng.uniform())));
        p.edits.push_back(RewardEdit::scale(spec.rules[rng.below(spec.rules.size())].id, 1.1));
        patches.push_back(patch_from_json(nlohmann::json::parse(to_json(p).dump())));
        spec = apply_patch(spec, patches.back());
    }
    RewardSpec replay{0, {rule("rest", "category == Rest", 0.5)}};
    for (const auto& p : patches) replay = apply_patch(replay, p);
    EXPECT_EQ(canonical(replay), canonical(spec));
    EXPECT_EQ(replay.version, 20);
}

TEST_F(Fixture, OneWeightChangesArgmax) {
    const std::vector<Action> candidates = {Action::of(ActionKind::rest), Action::of(ActionKind::wander),
                                            Action::of(ActionKind::dance)};
    auto argmax = [&](const RewardSpec& raw) {
        const CompiledSpec spec(raw, b);
        std::size_t best = 0;
        double best_v = -1e9;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const double v = total_reward(evaluate_intrinsic(spec, s, candidates[i], b), 0.0);
            if (v > best_v) best_v = v, best = i;
        }
        return best;
    };
    const RewardSpec a{0, {rule("rest", "category == Rest", 1.0), rule("explore", "category == Explore", 0.5)}};
    RewardSpec c = a;
    c.rules[1].weight = 1.5;
    EXPECT_EQ(argmax(a), 0u);
    EXPECT_EQ(argmax(c), 1u);
}
