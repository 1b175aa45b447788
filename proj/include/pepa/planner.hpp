#pragma once

#include <cstdint>
#include <vector>

#include "pepa/mcts.hpp"
#include "pepa/reward.hpp"
#include "pepa/world.hpp"

namespace pepa {

/// Digest of every field that influences future dynamics.
std::uint64_t state_digest(const WorldState& s);

/// Structural action set at `s`: the 18 primitive kinds plus move_to
/// home, the charger, the pending command's target and two exploration targets.
std::vector<Action> candidate_actions(const WorldState& s, const Building& b);

/// Rooms offered as exploration targets at `s` (same floor first).
std::vector<LocationId> explore_targets(const WorldState& s, const Building& b);

struct RuleOracleConfig {
    double temperature = 0.25;  // softmax temperature over immediate reward
    std::size_t top_k = 8;
};

/// Planning context for the sandbox: a private simulator copy with no
/// future events, the compiled intrinsic spec, and the rule-based oracles.
class SimPlanner {
public:
    SimPlanner(const SimConfig& sim, const RewardSpec& spec, PlannerConfig cfg, RuleOracleConfig oracle = {});

    /// R_total for one executed tick.
    double tick_reward(const WorldState& pre, const Action& a, const StepOutcome& out) const;

    /// Candidates after merging actions that are indistinguishable to the
    /// reward and the dynamics, ranked by a softmax over immediate reward
    /// and cut to top_k. Priors are normalised over the returned set.
    std::vector<Candidate<Action>> priors(const WorldState& s) const;

    /// Greedy rollout of rollout_depth ticks; discounted R_total.
    double rollout_value(const WorldState& s, Rng& rng) const;
    /// Greedy rollout until the clock reaches `end_clock`. plan() ends every
    /// rollout rollout_depth ticks after the search root, so a multi-tick
    /// move is not credited with a longer horizon than a one-tick action.
    double rollout_until(const WorldState& s, int end_clock, Rng& rng) const;

    /// Discounted reward of `a` from `s`, running a move_to to completion.
    Transition<WorldState> apply(const WorldState& s, const Action& a, Rng& rng, double gamma) const;

    SearchResult<Action> plan(const WorldState& s, std::uint64_t seed) const;

    const Building& building() const { return world_.building(); }
    const CompiledSpec& spec() const { return spec_; }
    const PlannerConfig& config() const { return cfg_; }

private:
    double immediate(const WorldState& s, const Action& a) const;

    mutable World world_;
    CompiledSpec spec_;
    PlannerConfig cfg_;
    RuleOracleConfig oracle_;
    bool reads_kind_ = true;
};

/// Adapter satisfying SearchModel.
struct SimModel {
    using State = WorldState;
    using Action = pepa::Action;
    const SimPlanner* planner;

    std::uint64_t digest(const WorldState& s) const { return state_digest(s); }
    bool is_terminal(const WorldState& s) const { return pepa::is_terminal(s); }
    Transition<WorldState> step(const WorldState& s, const Action& a, Rng& rng, double gamma) const {
        return planner->apply(s, a, rng, gamma);
    }
};

}  // namespace pepa
