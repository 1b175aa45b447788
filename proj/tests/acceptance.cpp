// Acceptance runner: one PASS/FAIL line per criterion, exit 0 only when all pass.
// Usage: acceptance [work_dir]   (run directories are written below work_dir)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pepa/distill.hpp"
#include "pepa/harness.hpp"
#include "pepa/mcts.hpp"
#include "pepa/oee.hpp"
#include "pepa/rng.hpp"
#include "toy_problems.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pepa;
using clk = std::chrono::steady_clock;

namespace {

const char* kNames[] = {"Lazy", "Playful", "Cautious", "Working", "Curious"};
constexpr std::uint64_t kSeed = 1;

double seconds_since(clk::time_point t0) { return std::chrono::duration<double>(clk::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<json> json_lines(const fs::path& p) {
    std::vector<json> out;
    std::ifstream in(p);
    for (std::string l; std::getline(in, l);)
        if (!l.empty()) out.push_back(json::parse(l));
    return out;
}

double share(const DayReport& d, Category c) { return d.distribution[static_cast<std::size_t>(c)]; }

int count(const std::array<int, kCategoryCount>& cs, Category c) { return cs[static_cast<std::size_t>(c)]; }

struct Verdict {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

struct Suite {
    std::map<std::string, ExperimentReport> reports;
    double seconds = 0.0;
};

// The five-personality, three-day rule-reflector loop, one run dir each.
Suite run_suite(const fs::path& root, const std::vector<PersonalityProfile>& ps) {
    Suite s;
    const auto t0 = clk::now();
    for (const char* name : kNames) {
        ExperimentOptions opt;
        opt.days = 3;
        opt.seed = kSeed;
        opt.mode = Mode::all_cloud_sim;
        opt.reflector = ReflectorKind::rule;
        opt.run_dir = root / name;
        s.reports[name] = run_experiment(find_profile(ps, name), opt);
    }
    s.seconds = seconds_since(t0);
    return s;
}

// --- 1 -----------------------------------------------------------------------

Verdict uct_exactness() {
    Verdict v;
    Rng rng(20240601);
    const auto t0 = clk::now();
    long double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const double q = rng.uniform() * 200 - 100;
        const double np = 1 + static_cast<double>(rng.below(10000000));
        const double ne = 1 + static_cast<double>(rng.below(static_cast<std::uint64_t>(np)));
        const double c = rng.uniform() * 4;
        const long double lq = q, lc = c, lnp = np, lne = ne;
        const long double ref = lq + lc * std::sqrt(std::log(lnp) / lne);
        const long double got = uct_score(q, np, ne, c);
        const long double rel = std::fabs(got - ref) / std::max(std::fabs(ref), 1e-300L);
        worst = std::max(worst, rel);
    }
    const double secs = seconds_since(t0);
    v.require(worst <= 1e-12L, fmt("max relative error %.3Le", worst));
    v.require(secs < 1.0, fmt("runtime %.3f s", secs));
    if (v.pass) v.note(fmt("max relative error %.2Le over 10000 inputs in %.3f s", worst, secs));
    return v;
}

// --- 2 -----------------------------------------------------------------------

Verdict mcts_matches_oracle() {
    Verdict v;
    const auto t0 = clk::now();
    int agree = 0, total = 0;
    for (const auto& p : {toy::one_step(), toy::deceptive_tree(), toy::slippery_grid()}) {
        v.require(p.states() <= 200, p.name + " has more than 200 states");
        PlannerConfig cfg;
        cfg.budget = 300;
        const int best = toy::argmax(toy::value_iteration_q(p, p.root, cfg.gamma));
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            cfg.seed = seed;
            const auto r =
                mcts_search(toy::Model{&p}, p.root, toy::uniform_prior(p), toy::default_rollout(p, cfg.gamma), cfg);
            ++total;
            if (r.action == best) ++agree;
            else v.require(false, fmt("%s seed %d picked %d, optimum %d", p.name.c_str(), int(seed), r.action, best));
        }
    }
    const double secs = seconds_since(t0);
    v.require(secs < 30.0, fmt("runtime %.2f s", secs));
    v.note(fmt("%d/%d root actions optimal in %.2f s", agree, total, secs));
    return v;
}

// --- 3 -----------------------------------------------------------------------

const char* kAtoms[] = {
    "battery < 40",    "battery >= 70",      "temp > 45",     "clock >= 600",        "mood < 0.3",
    "category == Rest", "category == Explore", "is_move",       "at_home",             "command_pending",
    "method == stairs", "target == charger",   "serves_command", "recent_failures >= 1", "kind == dance",
};

std::string random_condition(Rng& rng) {
    std::string c = kAtoms[rng.below(std::size(kAtoms))];
    for (auto extra = rng.below(3); extra > 0; --extra) {
        c += rng.bernoulli(0.5) ? " and " : " or ";
        if (rng.bernoulli(0.3)) c += "not ";
        c += kAtoms[rng.below(std::size(kAtoms))];
    }
    return c;
}

Verdict reward_properties() {
    Verdict v;
    World world(SimConfig::defaults());
    const Building& b = world.building();
    const WorldState base = world.reset(3);
    Rng rng(99);
    int violations = 0;
    auto violate = [&](const std::string& what) {
        if (violations++ < 3) v.require(false, what);
    };
    for (int trial = 0; trial < 1000; ++trial) {
        RewardSpec left, right, both;
        const auto n = rng.below(7);
        for (std::uint64_t i = 0; i < n; ++i) {
            RewardRule r{"r" + std::to_string(i), random_condition(rng), std::round((rng.uniform() * 6 - 3) * 64) / 64,
                         Provenance::personality_preference};
            (rng.bernoulli(0.5) ? left : right).rules.push_back(r);
            both.rules.push_back(r);
        }
        WorldState s = base;
        s.battery_units = static_cast<BatteryUnits>(rng.below(kBatteryFull + 1));
        s.motor_temp = 25 + rng.uniform() * 50;
        s.clock = static_cast<int>(rng.below(1440));
        s.mood = rng.uniform() * 2 - 1;
        s.location = b.rooms()[rng.below(b.rooms().size())];
        s.floor = b.floor_of(s.location);
        const auto cands = candidate_actions(s, b);
        const Action a = cands[rng.below(cands.size())];

        const CompiledSpec cb(both, b), cl(left, b), cr(right, b);
        const WorldState before = s;
        const double intr = evaluate_intrinsic(cb, s, a, b);
        // independent oracle: each rule compiled and tested on its own
        double oracle = 0.0;
        for (const auto& r : both.rules)
            if (Condition::compile(r.condition, b).eval(make_facts(s, a, b))) oracle += r.weight;
        if (intr != oracle) violate(fmt("trial %d: intrinsic %.6f, rule-by-rule %.6f", trial, intr, oracle));
        if (intr != evaluate_intrinsic(cl, s, a, b) + evaluate_intrinsic(cr, s, a, b))
            violate(fmt("trial %d: intrinsic not additive over a rule split", trial));
        if (evaluate_intrinsic(cb, s, a, b) != intr || !(s == before)) violate(fmt("trial %d: evaluation impure", trial));

        World w(SimConfig::defaults());
        Rng draws(static_cast<std::uint64_t>(trial));
        const StepOutcome out = w.step(s, a, draws);
        if (total_reward(intr, out.extrinsic_reward) != intr + out.extrinsic_reward)
            violate(fmt("trial %d: total != intrinsic + extrinsic", trial));
        const SimPlanner planner(SimConfig::defaults(), both, PlannerConfig{});
        if (planner.tick_reward(s, a, out) != intr + out.extrinsic_reward)
            violate(fmt("trial %d: planner tick reward differs from the sum", trial));
    }
    v.note(fmt("%d violations over 1000 random specs and states", violations));
    v.pass = violations == 0;
    return v;
}

// --- 4 / 5 -------------------------------------------------------------------

Verdict self_evolution(const Suite& s) {
    Verdict v;
    std::string rows;
    for (const char* name : kNames) {
        const auto& r = s.reports.at(name);
        v.require(r.days.size() == 3, fmt("%s ran %zu days", name, r.days.size()));
        if (r.days.size() != 3) continue;
        const auto& d1 = r.days[0];
        const auto& d3 = r.days[2];
        v.require(d1.survival_ticks < 1440, fmt("%s survived day 1", name));
        v.require(d3.survival_ticks == 1440, fmt("%s day-3 survival %d", name, d3.survival_ticks));
        v.require(d3.final_battery >= 72.0, fmt("%s day-3 final battery %.1f", name, d3.final_battery));
        rows += fmt(" %s %d/%d/%d@%.0f%%", name, d1.survival_ticks, r.days[1].survival_ticks, d3.survival_ticks,
                    d3.final_battery);
    }
    v.require(s.seconds < 120.0, fmt("suite runtime %.1f s", s.seconds));
    v.note(fmt("survival d1/d2/d3@battery:%s; %.1f s", rows.c_str(), s.seconds));
    return v;
}

Verdict behaviour_divergence(const Suite& s) {
    Verdict v;
    const auto& lazy = s.reports.at("Lazy").days;
    const auto& cautious = s.reports.at("Cautious").days;
    const auto& playful = s.reports.at("Playful").days;
    const double r1 = share(lazy[0], Category::Rest), r2 = share(lazy[1], Category::Rest),
                 r3 = share(lazy[2], Category::Rest);
    v.require(r1 < r2 && r2 < r3, fmt("Lazy Rest %.1f -> %.1f -> %.1f", r1, r2, r3));
    for (const auto& d : cautious)
        v.require(share(d, Category::Explore) == 0.0, fmt("Cautious Explore %.2f on day %d", share(d, Category::Explore), d.day));
    for (const auto& d : playful)
        v.require(share(d, Category::Explore) >= 15.0, fmt("Playful Explore %.1f on day %d", share(d, Category::Explore), d.day));
    v.note(fmt("Lazy Rest %.1f/%.1f/%.1f%%, Cautious Explore %.1f/%.1f/%.1f%%, Playful Explore %.1f/%.1f/%.1f%%", r1, r2,
               r3, share(cautious[0], Category::Explore), share(cautious[1], Category::Explore),
               share(cautious[2], Category::Explore), share(playful[0], Category::Explore),
               share(playful[1], Category::Explore), share(playful[2], Category::Explore)));
    return v;
}

// --- 6 -----------------------------------------------------------------------

Verdict action_preference(const fs::path& suite_dir) {
    Verdict v;
    const HarnessConfig cfg;
    const World world(cfg.sim);
    const auto scenarios = load_scenarios(world);
    auto trial = [&](const char* name, const char* scenario) {
        // day-3 spec recorded by the self-evolution run
        const auto specs = json_lines(suite_dir / name / "specs.jsonl");
        const RewardSpec spec = spec_from_json(specs.at(2));
        const SimPlanner planner(cfg.sim, spec, cfg.planner, cfg.oracle);
        return action_preference_trial(planner, find_scenario(scenarios, scenario), 10, 7);
    };
    const auto lazy = trial("Lazy", "A");
    const int lazy_rest = count(lazy, Category::Rest);
    v.require(lazy_rest == 10, fmt("Lazy/A Rest %d/10", lazy_rest));
    std::string detail = fmt("Lazy/A Rest %d/10", lazy_rest);
    for (const char* name : {"Playful", "Cautious", "Working"}) {
        const auto c = trial(name, "C");
        const int k = count(c, Category::Return) + count(c, Category::Affection);
        v.require(k == 10, fmt("%s/C Return-or-Affection %d/10", name, k));
        detail += fmt(", %s/C %d/10", name, k);
    }
    const auto curious = trial("Curious", "B");
    const int k = count(curious, Category::Explore) + count(curious, Category::Affection);
    v.require(k >= 8, fmt("Curious/B Explore-or-Affection %d/10", k));
    detail += fmt(", Curious/B %d/10", k);
    v.note(detail);
    return v;
}

// --- 7 -----------------------------------------------------------------------

Verdict architecture(const Suite& cloud, const std::vector<PersonalityProfile>& ps) {
    Verdict v;
    const HarnessConfig cfg;
    double hybrid_ticks = 0, edge_ticks = 0, hybrid_latency = 0, edge_latency = 0, cloud_latency = 0;
    for (const char* name : kNames) {
        ExperimentOptions opt;
        opt.days = 3;
        opt.seed = kSeed;
        opt.mode = Mode::hybrid;
        const auto h = run_experiment(find_profile(ps, name), opt);
        opt.mode = Mode::all_edge_sim;
        const auto e = run_experiment(find_profile(ps, name), opt);
        v.require(h.chat_calls_per_day == 1.0, fmt("%s hybrid calls/day %.3f", name, h.chat_calls_per_day));
        for (const auto& d : h.days) v.require(d.chat_calls == 1.0, fmt("%s hybrid day %d calls %.0f", name, d.day, d.chat_calls));
        v.require(h.mean_decision_latency * 10.0 <= cfg.cloud_latency,
                  fmt("%s distilled latency %.4f s", name, h.mean_decision_latency));
        hybrid_ticks += h.days.back().survival_ticks;
        edge_ticks += e.days.back().survival_ticks;
        hybrid_latency += h.mean_decision_latency / std::size(kNames);
        edge_latency += e.mean_decision_latency / std::size(kNames);
        cloud_latency += cloud.reports.at(name).mean_decision_latency / std::size(kNames);
    }
    const double hh = hybrid_ticks / std::size(kNames) / 60.0, eh = edge_ticks / std::size(kNames) / 60.0;
    v.require(eh < hh, fmt("edge day-3 survival %.2f h not below hybrid %.2f h", eh, hh));
    v.require(hybrid_latency < edge_latency && edge_latency < cloud_latency, "latency ordering hybrid < edge < cloud");
    v.note(fmt("hybrid 1 call/day, latency %.3f ms (measured) < edge %.2f s < cloud %.2f s; day-3 survival hybrid %.2f "
               "h, edge %.2f h",
               hybrid_latency * 1000.0, edge_latency, cloud_latency, hh, eh));
    return v;
}

// --- 8 -----------------------------------------------------------------------

Verdict distillation(const std::vector<PersonalityProfile>& ps) {
    Verdict v;
    const SimConfig sim = SimConfig::defaults();
    const auto t0 = clk::now();
    std::string detail;
    for (const char* name : kNames) {
        const auto spec = generate_initial_goals(find_profile(ps, name), CapabilityCatalog::standard()).second;
        const SimPlanner teacher(sim, spec, PlannerConfig{});
        CollectConfig cc;
        cc.states = 500;
        cc.seed = 11;
        const Dataset train = collect_dataset(teacher, sim, cc);
        cc.seed = 99;
        const Dataset test = collect_dataset(teacher, sim, cc);
        const DistilledPolicy policy = train_distilled(train, teacher);
        int hits = 0, invalid = 0;
        for (const auto& ex : test.examples) {
            const Prediction p = policy.predict(ex.state, teacher.building(), teacher);
            hits += p.action == ex.action;
            invalid += !valid_bio(p.tags);
        }
        const double agree = static_cast<double>(hits) / static_cast<double>(test.examples.size());
        v.require(test.examples.size() == 500, fmt("%s held-out set has %zu states", name, test.examples.size()));
        v.require(agree >= 0.90, fmt("%s agreement %.3f", name, agree));
        v.require(invalid == 0, fmt("%s %d invalid BIO sequences", name, invalid));
        detail += fmt("%s%s %.3f", detail.empty() ? "" : ", ", name, agree);
    }
    const double secs = seconds_since(t0);
    v.require(secs < 120.0, fmt("runtime %.1f s", secs));
    v.note(fmt("held-out agreement %s; all BIO valid; %.1f s", detail.c_str(), secs));
    return v;
}

// --- 9 -----------------------------------------------------------------------

Verdict patch_replay(const Suite& s, const fs::path& suite_dir) {
    Verdict v;
    for (const char* name : kNames) {
        const fs::path dir = suite_dir / name;
        const auto specs = json_lines(dir / "specs.jsonl");
        const auto goals = json_lines(dir / "goals.jsonl");
        const auto refl = json_lines(dir / "reflections.jsonl");
        for (std::size_t i = 0; i < specs.size(); ++i)
            v.require(specs[i]["version"] == i, fmt("%s spec chain gap at %zu", name, i));
        for (std::size_t i = 0; i < goals.size(); ++i)
            v.require(goals[i]["version"] == i, fmt("%s goal chain gap at %zu", name, i));
        v.require(specs.size() == 4 && goals.size() == 4 && refl.size() == 3, fmt("%s chain lengths", name));
        if (!v.pass) continue;

        RewardSpec cur = spec_from_json(specs[0]);
        std::vector<ReflectionOutput> outs;
        for (const auto& r : refl) {
            outs.push_back(parse_reflection_response(r["output"].dump(), cur));
            cur = apply_patch(cur, outs.back().patch);
        }
        const Replay rp = replay_reflections(spec_from_json(specs[0]), goals_from_json(goals[0]), outs);
        const auto& rep = s.reports.at(name);
        v.require(to_json(rp.specs.back()).dump() == to_json(rep.final_spec).dump(), fmt("%s final spec differs", name));
        v.require(to_json(rp.goals.back()).dump() == to_json(rep.final_goals).dump(), fmt("%s final goals differ", name));
        v.require(to_json(rp.specs.back()).dump() == specs.back().dump(), fmt("%s recorded spec differs", name));
        v.require(to_json(rp.goals.back()).dump() == goals.back().dump(), fmt("%s recorded goals differ", name));
        for (std::size_t i = 0; i < rp.specs.size(); ++i)
            v.require(rp.specs[i].version == static_cast<int>(i) && rp.goals[i].version == static_cast<int>(i),
                      fmt("%s replayed chain gap at %zu", name, i));
    }
    if (v.pass) v.note("5 runs replayed byte-identically, spec and goal chains v0..v3 gapless");
    return v;
}

// --- 10 ----------------------------------------------------------------------

template <class T, class Eq>
std::optional<std::pair<std::size_t, std::size_t>> brute_force(const std::vector<T>& xs, Eq eq) {
    for (std::size_t j = 1; j < xs.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (eq(xs[i], xs[j])) return std::pair{i + 1, j + 1};
    return std::nullopt;
}

Verdict oee_soundness(const fs::path& suite_dir) {
    Verdict v;
    auto t = [](int day, std::string a) { return GoalTrajectory{day, day - 1, std::move(a)}; };
    const std::vector<RewardSpec> one = {RewardSpec{}};
    using P = std::pair<std::size_t, std::size_t>;

    const auto planted = oee_check({t(1, "x1"), t(2, "x2"), t(3, "x1")}, one);
    v.require(planted.state_recurrence == P{1, 3}, "planted [x1, x2, x1] not reported at (1, 3)");

    std::vector<GoalTrajectory> distinct;
    for (int i = 0; i < 50; ++i) distinct.push_back(t(i + 1, "trajectory " + std::to_string(i)));
    const auto none = oee_check(distinct, one);
    v.require(!none.state_recurrence && !none.rule_recurrence && none.horizon == 50, "50 distinct trajectories");

    const RewardRule a{"a", "battery < 30", -1.0, Provenance::constraint_penalty};
    const RewardRule b{"b", "category == Rest", 0.4, Provenance::personality_preference};
    const std::vector<RewardSpec> specs = {RewardSpec{0, {a}}, RewardSpec{1, {a, b}}, RewardSpec{2, {a, b}}};
    const auto rule = oee_check({t(1, "p"), t(2, "q"), t(3, "r")}, specs);
    v.require(rule.rule_recurrence == P{2, 3} && !rule.state_recurrence, "identical specs on days 2 and 3");

    Rng rng(31);
    int checked = 0, found = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = 1 + rng.below(100);
        const auto alphabet = 1 + rng.below(trial % 2 ? 6 : 1000000);
        std::vector<GoalTrajectory> ts;
        for (std::uint64_t i = 0; i < n; ++i) ts.push_back(t(int(i) + 1, "s" + std::to_string(rng.below(alphabet))));
        std::vector<RewardSpec> ss;
        for (auto m = 1 + rng.below(6); m > 0; --m) {
            RewardSpec sp;
            sp.version = static_cast<int>(ss.size());
            if (rng.bernoulli(0.5)) sp.rules.push_back(a);
            if (rng.bernoulli(0.5)) sp.rules.push_back(b);
            ss.push_back(sp);
        }
        const auto r = oee_check(ts, ss);
        const auto ws =
            brute_force(ts, [](const GoalTrajectory& x, const GoalTrajectory& y) { return x.actions == y.actions; });
        const auto wr = brute_force(ss, [](const RewardSpec& x, const RewardSpec& y) { return x.rules == y.rules; });
        ++checked;
        found += ws.has_value();
        if (r.state_recurrence != ws || r.rule_recurrence != wr) {
            v.require(false, fmt("brute-force disagreement on fixture %d", trial));
            break;
        }
        if (r.state_recurrence && ts[r.state_recurrence->first - 1].actions != ts[r.state_recurrence->second - 1].actions)
            v.require(false, fmt("unsound pair on fixture %d", trial));
    }

    // the recorded runs, for the log
    const World world(SimConfig::defaults());
    std::string runs;
    for (const char* name : kNames) {
        const auto mem = MemoryStore::load(world.building(), suite_dir / name / "memory.jsonl");
        std::vector<RewardSpec> chain;
        for (const auto& j : json_lines(suite_dir / name / "specs.jsonl")) chain.push_back(spec_from_json(j));
        const auto r = oee_check(trajectories_from_log(mem.records(), world.building()), chain);
        if (r.state_recurrence)
            runs += fmt(" %s state (%zu, %zu)", name, r.state_recurrence->first, r.state_recurrence->second);
        if (r.rule_recurrence)
            runs += fmt(" %s rules (%zu, %zu)", name, r.rule_recurrence->first, r.rule_recurrence->second);
    }
    v.note(fmt("planted/distinct/independence fixtures exact; %d random fixtures (%d with repeats) match brute force; "
               "recurrences in recorded runs:%s",
               checked, found, runs.empty() ? " none" : runs.c_str()));
    return v;
}

// --- 11 ----------------------------------------------------------------------

json manifest_without_clock(const fs::path& p) {
    json j = json::parse(slurp(p));
    j.erase("started_at");
    j.erase("finished_at");
    j.erase("timing");
    return j;
}

Verdict determinism(const fs::path& a, const fs::path& b) {
    Verdict v;
    std::vector<fs::path> files_a, files_b;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) files_a.push_back(fs::relative(e.path(), a));
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) files_b.push_back(fs::relative(e.path(), b));
    std::sort(files_a.begin(), files_a.end());
    std::sort(files_b.begin(), files_b.end());
    v.require(files_a == files_b, "run directories list different files");
    std::size_t bytes = 0;
    for (const auto& rel : files_a) {
        if (!fs::exists(b / rel)) continue;
        if (rel.filename() == "manifest.json") {
            v.require(manifest_without_clock(a / rel) == manifest_without_clock(b / rel), rel.string() + " differs");
            continue;
        }
        const std::string x = slurp(a / rel), y = slurp(b / rel);
        bytes += x.size();
        v.require(x == y, rel.string() + " differs");
    }
    v.note(fmt("%zu files (%zu bytes) identical, manifest timestamps excluded", files_a.size(), bytes));
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_runs");
    fs::create_directories(work);
    const auto ps = load_prototypes();
    int failed = 0;
    auto report = [&](int id, const char* title, const std::function<Verdict()>& f) {
        Verdict v;
        const auto t0 = clk::now();
        try {
            v = f();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        failed += !v.pass;
        std::printf("[%s] %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    };

    report(1, "UCT exactness", uct_exactness);
    report(2, "MCTS equals value iteration", mcts_matches_oracle);
    report(3, "reward additivity and purity", reward_properties);

    Suite first;
    report(4, "self-evolution trend", [&] {
        first = run_suite(work / "run_a", ps);
        return self_evolution(first);
    });
    const bool have_suite = first.reports.size() == std::size(kNames);
    auto needs_suite = [&](std::function<Verdict()> f) {
        return [have_suite, f] {
            if (!have_suite) return Verdict{false, "self-evolution suite did not complete"};
            return f();
        };
    };
    report(5, "behaviour divergence", needs_suite([&] { return behaviour_divergence(first); }));
    report(6, "action preference", needs_suite([&] { return action_preference(work / "run_a"); }));
    report(7, "architecture accounting", needs_suite([&] { return architecture(first, ps); }));
    report(8, "distillation fidelity", [&] { return distillation(ps); });
    report(9, "patch and goal replay", needs_suite([&] { return patch_replay(first, work / "run_a"); }));
    report(10, "OEE checker soundness", needs_suite([&] { return oee_soundness(work / "run_a"); }));
    report(11, "determinism", needs_suite([&] {
        run_suite(work / "run_b", ps);
        return determinism(work / "run_a", work / "run_b");
    }));

    std::printf("%d of 11 criteria passed\n", 11 - failed);
    return failed == 0 ? 0 : 1;
}
