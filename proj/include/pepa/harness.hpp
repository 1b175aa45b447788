#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pepa/distill.hpp"
#include "pepa/memory.hpp"
#include "pepa/personality.hpp"
#include "pepa/planner.hpp"
#include "pepa/reflection.hpp"
#include "pepa/reward.hpp"
#include "pepa/world.hpp"

namespace pepa {

enum class Mode : std::uint8_t { all_cloud_sim, all_edge_sim, hybrid };
std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

struct HarnessConfig {
    SimConfig sim = SimConfig::defaults();
    PlannerConfig planner;
    RuleOracleConfig oracle;
    double cloud_latency = 25.64;  // seconds per cloud call, accounted only
    double edge_latency = 3.54;    // seconds per edge call, accounted only
    int distill_states = 500;      // teacher-labelled states per daily retrain
    int audit_every = 97;          // shadow reward audit cadence, ticks

    static HarnessConfig defaults() { return {}; }
};

/// Per-tick action selection.
class Decider {
public:
    virtual ~Decider() = default;
    virtual Action decide(const WorldState& s, std::uint64_t seed) = 0;
};

/// Full tree search at every decision.
class PlannerDecider : public Decider {
public:
    explicit PlannerDecider(const SimPlanner& planner) : planner_(&planner) {}
    Action decide(const WorldState& s, std::uint64_t seed) override { return planner_->plan(s, seed).action; }

private:
    const SimPlanner* planner_;
};

/// Student policy per decision, falling back to the planner's oracle.
class DistilledDecider : public Decider {
public:
    DistilledDecider(const DistilledPolicy& policy, const SimPlanner& oracle) : policy_(&policy), oracle_(&oracle) {}
    Action decide(const WorldState& s, std::uint64_t) override {
        return policy_->predict(s, oracle_->building(), *oracle_).action;
    }

private:
    const DistilledPolicy* policy_;
    const SimPlanner* oracle_;
};

struct DayResult {
    DailySummary summary;
    int survival_ticks = 0;
    std::array<double, kCategoryCount> distribution{};  // percent per category
    int decisions = 0;
    double decision_seconds = 0.0;  // measured wall time inside decide()
    double max_decision_seconds = 0.0;
    int audited_ticks = 0;
};

/// Steps one day from `start`, deciding at every tick without travel in
/// progress, recording every tick into `memory`. The shadow recorder
/// re-evaluates R_total independently on sampled ticks and throws
/// InvariantError on a mismatch.
DayResult run_day(int day, const WorldState& start, const GoalSet& goals, const RewardSpec& spec, World& world,
                  Decider& decider, const SimPlanner& planner, MemoryStore& memory, std::uint64_t seed,
                  int audit_every = 97);

/// Category shares of a summary in percent (sum 100 when any action ran).
std::array<double, kCategoryCount> category_distribution(const DailySummary& s);

struct DayReport {
    int day = 0;
    int survival_ticks = 0;
    double final_battery = 0.0;
    double min_battery = 0.0;
    std::array<double, kCategoryCount> distribution{};
    int goals_version = 0;
    int spec_version = 0;
    int decisions = 0;
    double chat_calls = 0.0;
    double mean_decision_latency = 0.0;  // seconds, accounted
    int navigation_failures = 0;
    int requests_completed = 0;
};

struct ExperimentReport {
    std::string personality;
    Mode mode = Mode::hybrid;
    std::uint64_t seed = 0;
    std::vector<DayReport> days;
    double chat_calls_per_day = 0.0;
    double mean_decision_latency = 0.0;
    double max_decision_latency = 0.0;
    GoalSet final_goals;      // after the last reflection
    RewardSpec final_spec;
};

nlohmann::json to_json(const ExperimentReport& r);
/// Inverse of to_json; final goals and spec come back as versions only.
ExperimentReport report_from_json(const nlohmann::json& j);

enum class ReflectorKind : std::uint8_t { rule, llm, fixture };
std::string_view to_string(ReflectorKind k);
std::optional<ReflectorKind> parse_reflector_kind(std::string_view s);

struct ExperimentOptions {
    int days = 3;
    std::uint64_t seed = 1;
    Mode mode = Mode::hybrid;
    ReflectorKind reflector = ReflectorKind::rule;
    std::optional<std::filesystem::path> fixture_dir;  // fixture replay or capture target
    std::optional<std::filesystem::path> run_dir;       // artifacts written here when set
    bool record_fixtures = false;
};

/// Days strictly in sequence: plan the day, summarise, reflect, install.
ExperimentReport run_experiment(const PersonalityProfile& p, const ExperimentOptions& opt,
                                const HarnessConfig& cfg = HarnessConfig::defaults());

/// Specs and goals of a run rebuilt from its recorded reflection outputs.
struct Replay {
    std::vector<RewardSpec> specs;
    std::vector<GoalSet> goals;
};
Replay replay_reflections(const RewardSpec& spec0, const GoalSet& goals0, const std::vector<ReflectionOutput>& outs);

struct Scenario {
    std::string id;
    std::string description;
    WorldState state;
};

/// Scenario file (config/scenarios.json): named fixed states.
std::vector<Scenario> load_scenarios(const World& world, const std::filesystem::path& path);
std::vector<Scenario> load_scenarios(const World& world);
const Scenario& find_scenario(const std::vector<Scenario>& ss, std::string_view id);

/// Selected-category counts over n planner runs with seeds mix_seed(seed, i).
std::array<int, kCategoryCount> action_preference_trial(const SimPlanner& planner, const Scenario& sc, int n,
                                                        std::uint64_t seed);

/// The spec a personality holds after `days` days of the rule-based loop
/// in cloud mode (the day-`days` spec), with its goal set.
std::pair<GoalSet, RewardSpec> evolved_spec(const PersonalityProfile& p, int days, std::uint64_t seed,
                                            const HarnessConfig& cfg = HarnessConfig::defaults());

struct ComparisonRow {
    Mode mode;
    double chat_calls_per_day = 0.0;
    double mean_decision_latency = 0.0;
    double day3_survival_hours = 0.0;  // mean over personalities
    std::vector<int> day3_survival_ticks;
};

std::vector<ComparisonRow> architecture_comparison(const std::vector<PersonalityProfile>& ps, int days,
                                                   std::uint64_t seed,
                                                   const HarnessConfig& cfg = HarnessConfig::defaults());

/// Figure data as CSV: distribution (personality, day, category shares) and
/// survival (personality, day, hours). Returns the written paths.
std::vector<std::filesystem::path> emit_figures(const std::vector<ExperimentReport>& reports,
                                                const std::filesystem::path& out_dir);

}  // namespace pepa
