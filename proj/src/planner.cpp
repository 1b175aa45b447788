#include "pepa/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace pepa {

namespace {

struct Hasher {
    std::uint64_t h = 0xcbf29ce484222325ull;
    template <class T>
    void add(const T& v) {
        unsigned char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        for (unsigned char c : buf) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    }
};

int cost_class(ActionKind k) {
    switch (k) {
        case ActionKind::idle:
        case ActionKind::rest:
        case ActionKind::sit:
        case ActionKind::lie_down:
        case ActionKind::stretch:
            return 0;
        case ActionKind::move_to:
            return 3;
        default:
            return action_class(k) == ActionClass::locomotion ? 1 : 2;
    }
}

Method method_between(const Building& b, LocationId from, LocationId to) {
    return b.floor_of(from) == b.floor_of(to) ? Method::walk : Method::elevator;
}

}  // namespace

std::uint64_t state_digest(const WorldState& s) {
    Hasher h;
    h.add(s.battery_units);
    h.add(s.motor_temp);
    h.add(s.location);
    h.add(s.floor);
    h.add(s.clock);
    h.add(s.mood);
    h.add(s.charging);
    h.add(s.active_streak);
    h.add(s.requests_completed);
    h.add(s.pending_events.size());
    for (const auto& e : s.pending_events) {
        h.add(e.tick);
        h.add(e.category);
        h.add(e.target);
        h.add(e.method.has_value());
        if (e.method) h.add(*e.method);
    }
    h.add(s.failure_ticks.size());
    for (int t : s.failure_ticks) h.add(t);
    h.add(s.travel.has_value());
    if (s.travel) {
        const auto& t = *s.travel;
        h.add(t.action.kind);
        h.add(t.action.target);
        h.add(t.action.method);
        h.add(t.leg_index);
        h.add(t.remaining);
        h.add(t.ticks_done);
        h.add(t.fsm.phase);
    }
    return h.h;
}

std::vector<LocationId> explore_targets(const WorldState& s, const Building& b) {
    const int next_floor = s.floor % std::max(1, b.floor_count()) + 1;
    const int x = s.location != kNoLocation ? b.node(s.location).x : 0;
    LocationId nearest = kNoLocation;
    int nearest_d = 0;
    std::size_t n_other = 0;
    auto eligible = [&](LocationId r) { return r != s.location && r != b.home() && r != b.charger(); };
    for (LocationId r : b.rooms()) {
        if (!eligible(r)) continue;
        const NodeSpec& n = b.node(r);
        if (n.floor == s.floor) {
            const int d = std::abs(n.x - x);
            if (nearest == kNoLocation || d < nearest_d) nearest = r, nearest_d = d;
        } else if (n.floor == next_floor) {
            ++n_other;
        }
    }
    std::vector<LocationId> out;
    if (nearest != kNoLocation && s.location != kNoLocation) out.push_back(nearest);
    if (n_other > 0) {
        std::size_t k = static_cast<std::size_t>(s.clock / 60) % n_other;
        for (LocationId r : b.rooms())
            if (eligible(r) && b.floor_of(r) == next_floor && k-- == 0) {
                out.push_back(r);
                break;
            }
    }
    return out;
}

namespace {

const std::vector<Action>& primitive_actions() {
    static const std::vector<Action> prims = [] {
        std::vector<Action> v;
        for (ActionKind k : all_action_kinds())
            if (k != ActionKind::move_to) v.push_back(Action::of(k));
        return v;
    }();
    return prims;
}

// Appends the move candidates of `s` in candidate order; `out` may already
// hold primitives, which never collide with moves.
void append_moves(const WorldState& s, const Building& b, std::vector<Action>& out) {
    const std::size_t first = out.size();
    auto add_move = [&](LocationId to, Method m) {
        if (to == kNoLocation || to == s.location) return;
        const Action a = Action::move(to, m);
        if (std::find(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(), a) == out.end()) out.push_back(a);
    };
    add_move(b.home(), method_between(b, s.location, b.home()));
    add_move(b.charger(), method_between(b, s.location, b.charger()));
    if (const UserEvent* cmd = s.pending_command(); cmd && cmd->target != kNoLocation) {
        Method m = cmd->method.value_or(method_between(b, s.location, cmd->target));
        if (m == Method::walk && b.floor_of(cmd->target) != b.floor_of(s.location)) m = Method::elevator;
        add_move(cmd->target, m);
    }
    for (LocationId r : explore_targets(s, b)) add_move(r, method_between(b, s.location, r));
}

}  // namespace

std::vector<Action> candidate_actions(const WorldState& s, const Building& b) {
    std::vector<Action> out;
    out.reserve(kActionKindCount + 5);
    out = primitive_actions();
    append_moves(s, b, out);
    return out;
}

SimPlanner::SimPlanner(const SimConfig& sim, const RewardSpec& spec, PlannerConfig cfg, RuleOracleConfig oracle)
    : world_([&] {
          SimConfig quiet = sim;
          quiet.schedule.clear();
          quiet.generator.reset();
          return World(quiet);
      }()),
      spec_(spec, world_.building()),
      cfg_(cfg),
      oracle_(oracle),
      reads_kind_(spec_.references(Field::kind)) {
    cfg_.validate();
}

double SimPlanner::immediate(const WorldState& s, const Action& a) const {
    return spec_.evaluate(make_facts(s, a, world_.building()));
}

double SimPlanner::tick_reward(const WorldState& pre, const Action& a, const StepOutcome& out) const {
    return total_reward(immediate(pre, a), out.extrinsic_reward);
}

Transition<WorldState> SimPlanner::apply(const WorldState& s, const Action& a, Rng& rng, double gamma) const {
    WorldState cur = s;
    double r = 0.0, disc = 1.0;
    int guard = 0;
    do {
        StepOutcome out = world_.step(cur, a, rng);
        r += disc * tick_reward(cur, a, out);
        disc *= gamma;
        cur = std::move(out.post_state);
    } while (a.is_move() && cur.travel && cur.travel->action == a && !is_terminal(cur) && ++guard < 240);
    const bool term = is_terminal(cur);
    return {std::move(cur), r, disc, term};
}

std::vector<Candidate<Action>> SimPlanner::priors(const WorldState& s) const {
    const Building& b = world_.building();
    struct Scored {
        Action a;
        double r;
        std::size_t order;
    };
    struct Key {
        int cost;
        Category cat;
        bool serves;
        std::vector<std::string> rules;
        bool operator==(const Key&) const = default;
    };
    std::vector<Scored> kept;
    std::vector<Key> keys;
    const auto cands = candidate_actions(s, b);
    Facts f = state_facts(s, b);
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const Action& a = cands[i];
        bind_action(f, s, a, b);
        if (!a.is_move()) {
            Key k{cost_class(a.kind), static_cast<Category>(static_cast<int>(f[Field::category])), f.flag(Field::serves_command), spec_.matching(f)};
            if (std::find(keys.begin(), keys.end(), k) != keys.end()) continue;
            keys.push_back(std::move(k));
        }
        kept.push_back({a, spec_.evaluate(f), i});
    }
    const double top = std::max_element(kept.begin(), kept.end(), [](const Scored& x, const Scored& y) {
                           return x.r < y.r;
                       })->r;
    std::vector<double> w(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) w[i] = std::exp((kept[i].r - top) / oracle_.temperature);
    std::vector<std::size_t> idx(kept.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return w[x] > w[y]; });
    if (idx.size() > oracle_.top_k) idx.resize(oracle_.top_k);
    double sum = 0.0;
    for (auto i : idx) sum += w[i];
    std::vector<Candidate<Action>> out;
    for (auto i : idx) out.push_back({kept[i].a, w[i] / sum});
    return out;
}

double SimPlanner::rollout_value(const WorldState& s, Rng& rng) const {
    return rollout_until(s, s.clock + cfg_.rollout_depth, rng);
}

double SimPlanner::rollout_until(const WorldState& s, int end_clock, Rng& rng) const {
    const Building& b = world_.building();
    const auto& prims = primitive_actions();
    WorldState cur = s;
    double g = 0.0, disc = 1.0;
    CompiledSpec::Prepared prep;
    std::vector<Action> moves;
    moves.reserve(5);
    while (cur.clock < end_clock && !is_terminal(cur)) {
        Facts f = state_facts(cur, b);
        spec_.prepare(f, prep);
        // Without rules on `kind`, primitives sharing (category, serves)
        // score the same.
        std::array<double, kCategoryCount * 2> memo;
        memo.fill(NAN);
        const Action* best = nullptr;
        double best_r = -INFINITY;
        for (const Action& a : prims) {
            bind_action(f, cur, a, b);
            double r;
            if (reads_kind_) {
                r = spec_.evaluate(f, prep);
            } else {
                double& m = memo[static_cast<std::size_t>(f[Field::category]) * 2 + (f.flag(Field::serves_command) ? 1 : 0)];
                if (std::isnan(m)) m = spec_.evaluate(f, prep);
                r = m;
            }
            if (r > best_r) best_r = r, best = &a;
        }
        moves.clear();
        append_moves(cur, b, moves);
        for (const Action& a : moves) {
            bind_action(f, cur, a, b);
            const double r = spec_.evaluate(f, prep);
            if (r > best_r) best_r = r, best = &a;
        }
        auto tr = apply(cur, *best, rng, cfg_.gamma);
        g += disc * tr.reward;
        disc *= tr.discount;
        cur = std::move(tr.next);
    }
    return g;
}

SearchResult<Action> SimPlanner::plan(const WorldState& s, std::uint64_t seed) const {
    PlannerConfig cfg = cfg_;
    cfg.seed = seed;
    const SimModel model{this};
    return mcts_search(
        model, s, [this](const WorldState& st) { return priors(st); },
        [this, end = s.clock + cfg_.rollout_depth](const WorldState& st, Rng& rng) { return rollout_until(st, end, rng); },
        cfg);
}

}  // namespace pepa
