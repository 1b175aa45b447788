#include "pepa/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>

#include "pepa/digest.hpp"
#include "pepa/errors.hpp"

namespace pepa {

using json = nlohmann::json;

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::all_cloud_sim: return "all_cloud_sim";
        case Mode::all_edge_sim: return "all_edge_sim";
        case Mode::hybrid: return "hybrid";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
    for (Mode m : {Mode::all_cloud_sim, Mode::all_edge_sim, Mode::hybrid})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

std::string_view to_string(ReflectorKind k) {
    switch (k) {
        case ReflectorKind::rule: return "rule";
        case ReflectorKind::llm: return "llm";
        case ReflectorKind::fixture: return "fixture";
    }
    return "?";
}

std::optional<ReflectorKind> parse_reflector_kind(std::string_view s) {
    for (ReflectorKind k : {ReflectorKind::rule, ReflectorKind::llm, ReflectorKind::fixture})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

std::array<double, kCategoryCount> category_distribution(const DailySummary& s) {
    std::array<double, kCategoryCount> out{};
    const int total = s.total_actions();
    if (total == 0) return out;
    for (const auto& [c, n] : s.action_counts) out[static_cast<std::size_t>(c)] = 100.0 * n / total;
    return out;
}

// ------------------------------------------------------------------ one day

DayResult run_day(int day, const WorldState& start, const GoalSet& goals, const RewardSpec& spec, World& world,
                  Decider& decider, const SimPlanner& planner, MemoryStore& memory, std::uint64_t seed,
                  int audit_every) {
    using clock = std::chrono::steady_clock;
    const Building& b = world.building();
    if (planner.spec().spec().version != spec.version)
        throw InvariantError("planner holds spec v" + std::to_string(planner.spec().spec().version) +
                             " but the day runs under v" + std::to_string(spec.version));
    const CompiledSpec shadow(spec, b);
    const std::string goals_tag = "goals=v" + std::to_string(goals.version);
    const std::string spec_tag = "spec=v" + std::to_string(spec.version);

    DayResult res;
    WorldState s = start;
    while (!is_terminal(s)) {
        Action a;
        const bool decided = !s.travel.has_value();
        if (decided) {
            const auto t0 = clock::now();
            a = decider.decide(s, mix_seed(seed, static_cast<std::uint64_t>(s.clock)));
            const double dt = std::chrono::duration<double>(clock::now() - t0).count();
            res.decision_seconds += dt;
            res.max_decision_seconds = std::max(res.max_decision_seconds, dt);
            ++res.decisions;
        } else {
            a = s.travel->action;
        }
        StepOutcome out = world.step(s, a);

        if (audit_every > 0 && s.clock % audit_every == 0) {
            const double wired = planner.tick_reward(s, a, out);
            const double expected = total_reward(shadow.evaluate(make_facts(s, a, b)), out.extrinsic_reward);
            if (wired != expected)
                throw InvariantError("reward wiring mismatch on day " + std::to_string(day) + " tick " +
                                     std::to_string(s.clock) + ": planner " + std::to_string(wired) + ", shadow " +
                                     std::to_string(expected));
            ++res.audited_ticks;
        }

        EpisodicRecord rec;
        rec.id = memory.last_id() + 1;
        rec.day = day;
        rec.tick = s.clock;
        rec.action = a;
        rec.category = action_category(a, b);
        rec.pre_state = s;
        rec.post_state = out.post_state;
        rec.outcome = out.outcome;
        rec.resources = {out.resources.time, out.resources.energy, out.resources.charge_gain};
        rec.context = {goals_tag, spec_tag, decided ? "decision" : "continuation"};
        if (!out.cause.empty()) rec.context.push_back("cause=" + out.cause);
        memory.record(rec);
        s = std::move(out.post_state);
    }
    res.summary = memory.summarize_day(day);
    res.survival_ticks = res.summary.battery_depleted_at_tick.value_or(s.clock);
    res.distribution = category_distribution(res.summary);
    return res;
}

// ------------------------------------------------------------------ reports

namespace {

json distribution_json(const std::array<double, kCategoryCount>& d) {
    json j = json::object();
    for (Category c : all_categories()) j[std::string(to_string(c))] = d[static_cast<std::size_t>(c)];
    return j;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

class JsonLines {
public:
    JsonLines() = default;
    explicit JsonLines(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
    }
    void put(const json& j) {
        if (out_.is_open()) out_ << j.dump() << '\n' << std::flush;
    }

private:
    std::ofstream out_;
};

constexpr const char* kArtifacts[] = {"manifest.json", "memory.jsonl", "specs.jsonl", "goals.jsonl",
                                      "reflections.jsonl", "report.json", "trace.json"};

std::shared_ptr<Reflector> make_reflector(const ExperimentOptions& opt, const HarnessConfig& cfg) {
    std::shared_ptr<FixtureStore> store;
    if (opt.fixture_dir) store = std::make_shared<FixtureStore>(*opt.fixture_dir);
    if ((opt.reflector == ReflectorKind::fixture || opt.record_fixtures) && !store)
        throw ConfigError("fixture_dir", "required for fixture replay or capture");
    const bool edge = opt.mode == Mode::all_edge_sim;
    std::shared_ptr<Reflector> r;
    switch (opt.reflector) {
        case ReflectorKind::rule:
            r = std::make_shared<RuleReflector>(edge, edge ? cfg.edge_latency : cfg.cloud_latency);
            break;
        case ReflectorKind::llm: {
            HttpChatConfig hc = HttpChatConfig::from_env();
            if (edge) hc.provider = Provider::edge;
            r = std::make_shared<LlmReflector>(std::make_shared<HttpChatClient>(hc));
            break;
        }
        case ReflectorKind::fixture:
            return std::make_shared<LlmReflector>(std::make_shared<FixtureChatClient>(store));
    }
    if (opt.record_fixtures) r = std::make_shared<RecordingReflector>(r, store);
    return r;
}

}  // namespace

json to_json(const ExperimentReport& r) {
    json days = json::array();
    for (const auto& d : r.days) {
        days.push_back({{"day", d.day},
                        {"survival_ticks", d.survival_ticks},
                        {"final_battery", d.final_battery},
                        {"min_battery", d.min_battery},
                        {"action_category_distribution", distribution_json(d.distribution)},
                        {"goals_version", d.goals_version},
                        {"spec_version", d.spec_version},
                        {"decisions", d.decisions},
                        {"chat_calls", d.chat_calls},
                        {"mean_decision_latency", d.mean_decision_latency},
                        {"navigation_failures", d.navigation_failures},
                        {"requests_completed", d.requests_completed}});
    }
    return {{"schema", "pepa.report"},
            {"version", 1},
            {"personality", r.personality},
            {"mode", std::string(to_string(r.mode))},
            {"seed", r.seed},
            {"days", days},
            {"chat_calls_per_day", r.chat_calls_per_day},
            {"decision_latency", {{"mean", r.mean_decision_latency}, {"max", r.max_decision_latency}}},
            {"final_goals_version", r.final_goals.version},
            {"final_spec_version", r.final_spec.version}};
}

ExperimentReport report_from_json(const json& j) {
    if (j.value("schema", "") != "pepa.report") throw ConfigError("schema", "not a pepa.report document");
    ExperimentReport r;
    r.personality = j.at("personality").get<std::string>();
    const auto mode = parse_mode(j.at("mode").get<std::string>());
    if (!mode) throw ConfigError("mode", "unknown mode");
    r.mode = *mode;
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& dj : j.at("days")) {
        DayReport d;
        d.day = dj.at("day").get<int>();
        d.survival_ticks = dj.at("survival_ticks").get<int>();
        d.final_battery = dj.at("final_battery").get<double>();
        d.min_battery = dj.at("min_battery").get<double>();
        for (const auto& [name, share] : dj.at("action_category_distribution").items()) {
            const auto c = parse_category(name);
            if (!c) throw ConfigError("action_category_distribution", "unknown category " + name);
            d.distribution[static_cast<std::size_t>(*c)] = share.get<double>();
        }
        d.goals_version = dj.at("goals_version").get<int>();
        d.spec_version = dj.at("spec_version").get<int>();
        d.decisions = dj.at("decisions").get<int>();
        d.chat_calls = dj.at("chat_calls").get<double>();
        d.mean_decision_latency = dj.at("mean_decision_latency").get<double>();
        d.navigation_failures = dj.at("navigation_failures").get<int>();
        d.requests_completed = dj.at("requests_completed").get<int>();
        r.days.push_back(d);
    }
    r.chat_calls_per_day = j.at("chat_calls_per_day").get<double>();
    r.mean_decision_latency = j.at("decision_latency").at("mean").get<double>();
    r.max_decision_latency = j.at("decision_latency").at("max").get<double>();
    r.final_goals.version = j.at("final_goals_version").get<int>();
    r.final_spec.version = j.at("final_spec_version").get<int>();
    return r;
}

// --------------------------------------------------------------- experiment

ExperimentReport run_experiment(const PersonalityProfile& p, const ExperimentOptions& opt, const HarnessConfig& cfg) {
    if (opt.days < 1) throw ConfigError("days", "must be at least 1");
    const auto started = utc_now();
    const auto wall0 = std::chrono::steady_clock::now();
    const CapabilityCatalog catalog = CapabilityCatalog::standard();
    auto [goals, spec] = generate_initial_goals(p, catalog);
    World world(cfg.sim);
    const Building& b = world.building();
    auto reflector = make_reflector(opt, cfg);

    const auto dir = opt.run_dir;
    if (dir) {
        std::filesystem::create_directories(*dir);
        for (const char* f : kArtifacts) std::filesystem::remove(*dir / f);
    }
    MemoryStore memory = dir ? MemoryStore::open(b, *dir / "memory.jsonl") : MemoryStore(b);
    JsonLines specs_log = dir ? JsonLines(*dir / "specs.jsonl") : JsonLines();
    JsonLines goals_log = dir ? JsonLines(*dir / "goals.jsonl") : JsonLines();
    JsonLines refl_log = dir ? JsonLines(*dir / "reflections.jsonl") : JsonLines();
    specs_log.put(to_json(spec));
    goals_log.put(to_json(goals));

    ExperimentReport rep;
    rep.personality = p.name;
    rep.mode = opt.mode;
    rep.seed = opt.seed;
    LongTermTrace trace;
    double latency_total = 0.0, measured_total = 0.0;
    int decisions_total = 0;

    for (int d = 1; d <= opt.days; ++d) {
        const auto ud = static_cast<std::uint64_t>(d);
        const WorldState start = world.reset(mix_seed(opt.seed, ud));
        const SimPlanner planner(cfg.sim, spec, cfg.planner, cfg.oracle);
        DistilledPolicy policy;
        std::unique_ptr<Decider> decider;
        if (opt.mode == Mode::hybrid) {
            CollectConfig cc;
            cc.states = cfg.distill_states;
            cc.seed = mix_seed(opt.seed, 1000 + ud);
            TrainConfig tc;
            tc.seed = mix_seed(opt.seed, 3000 + ud);
            policy = train_distilled(collect_dataset(planner, cfg.sim, cc), planner, tc);
            decider = std::make_unique<DistilledDecider>(policy, planner);
        } else {
            decider = std::make_unique<PlannerDecider>(planner);
        }
        DayResult r =
            run_day(d, start, goals, spec, world, *decider, planner, memory, mix_seed(opt.seed, 2000 + ud), cfg.audit_every);

        ReflectionInput in{&p, &catalog, &b, r.summary, goals, spec};
        ReflectionResult rr = reflector->reflect(in);
        RewardSpec next_spec = apply_patch(spec, rr.output.patch);
        if (rr.output.next_goals.ultimate_goal != goals.ultimate_goal)
            throw InvariantError("reflection changed the ultimate goal");

        DayReport dr;
        dr.day = d;
        dr.survival_ticks = r.survival_ticks;
        dr.final_battery = r.summary.final_battery;
        dr.min_battery = r.summary.min_battery;
        dr.distribution = r.distribution;
        dr.goals_version = goals.version;
        dr.spec_version = spec.version;
        dr.decisions = r.decisions;
        dr.navigation_failures = r.summary.navigation_failures;
        dr.requests_completed = r.summary.requests_completed;
        double latency = 0.0;
        switch (opt.mode) {
            case Mode::all_cloud_sim:
                dr.chat_calls = r.decisions + 1;
                latency = cfg.cloud_latency * r.decisions;
                break;
            case Mode::all_edge_sim:
                dr.chat_calls = 0;
                latency = cfg.edge_latency * r.decisions;
                break;
            case Mode::hybrid:
                dr.chat_calls = 1;
                latency = r.decision_seconds;
                rep.max_decision_latency = std::max(rep.max_decision_latency, r.max_decision_seconds);
                break;
        }
        if (opt.mode != Mode::hybrid && r.decisions > 0) {
            const double per = latency / r.decisions;
            rep.max_decision_latency = std::max(rep.max_decision_latency, per);
        }
        dr.mean_decision_latency = r.decisions > 0 ? latency / r.decisions : 0.0;
        latency_total += latency;
        measured_total += r.decision_seconds;
        decisions_total += r.decisions;
        rep.days.push_back(dr);

        trace.append({d, goals.version, spec.version, summary_digest(r.summary, b)});
        refl_log.put({{"day", d},
                      {"prompt_digest", digest_hex(rr.exchange.prompt)},
                      {"provider", std::string(to_string(rr.exchange.provider))},
                      {"latency", rr.exchange.latency},
                      {"output", to_json(rr.output)}});
        spec = std::move(next_spec);
        goals = rr.output.next_goals;
        specs_log.put(to_json(spec));
        goals_log.put(to_json(goals));
    }

    double calls = 0.0;
    for (const auto& d : rep.days) calls += d.chat_calls;
    rep.chat_calls_per_day = calls / opt.days;
    rep.mean_decision_latency = decisions_total > 0 ? latency_total / decisions_total : 0.0;
    rep.final_goals = goals;
    rep.final_spec = spec;

    if (dir) {
        write_json(*dir / "report.json", to_json(rep));
        write_json(*dir / "trace.json", trace.to_json());
        json files = json::array();
        for (const char* f : kArtifacts) files.push_back(f);
        write_json(*dir / "manifest.json",
                   {{"schema", "pepa.run"},
                    {"version", 1},
                    {"personality", p.name},
                    {"mode", std::string(to_string(opt.mode))},
                    {"reflector", std::string(to_string(opt.reflector))},
                    {"seed", opt.seed},
                    {"days", opt.days},
                    {"planner", {{"budget", cfg.planner.budget},
                                 {"rollout_depth", cfg.planner.rollout_depth},
                                 {"c", cfg.planner.c},
                                 {"gamma", cfg.planner.gamma}}},
                    {"files", files},
                    {"started_at", started},
                    {"finished_at", utc_now()},
                    {"timing",
                     {{"wall_seconds",
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count()},
                      {"decision_seconds", measured_total},
                      {"decisions", decisions_total}}}});
    }
    return rep;
}

Replay replay_reflections(const RewardSpec& spec0, const GoalSet& goals0, const std::vector<ReflectionOutput>& outs) {
    Replay r;
    r.specs.push_back(spec0);
    r.goals.push_back(goals0);
    for (const auto& o : outs) {
        r.specs.push_back(apply_patch(r.specs.back(), o.patch));
        const GoalSet& prev = r.goals.back();
        if (o.next_goals.version != prev.version + 1)
            throw InvariantError("goal chain gap: v" + std::to_string(prev.version) + " followed by v" +
                                 std::to_string(o.next_goals.version));
        if (o.next_goals.ultimate_goal != prev.ultimate_goal) throw InvariantError("ultimate goal changed in replay");
        r.goals.push_back(o.next_goals);
    }
    return r;
}

// ---------------------------------------------------------------- scenarios

std::vector<Scenario> load_scenarios(const World& world, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenarios", "cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenarios", e.what());
    }
    if (j.value("schema", "") != "pepa.scenarios" || j.value("version", 0) != 1)
        throw ConfigError("scenarios.schema", "expected pepa.scenarios version 1");
    const Building& b = world.building();
    auto location = [&](const json& v, const std::string& field) {
        auto id = b.find(v.get<std::string>());
        if (!id) throw ConfigError(field, "unknown location '" + v.get<std::string>() + "'");
        return *id;
    };
    std::vector<Scenario> out;
    try {
        for (const auto& sj : j.at("scenarios")) {
            Scenario sc;
            sc.id = sj.at("id").get<std::string>();
            sc.description = sj.at("description").get<std::string>();
            const std::string where = "scenarios." + sc.id;
            WorldState& s = sc.state;
            const double battery = sj.at("battery").get<double>();
            if (!(battery > 0 && battery <= 100)) throw ConfigError(where + ".battery", "must be in (0, 100]");
            s.battery_units = static_cast<BatteryUnits>(std::llround(battery * kBatteryScale));
            s.mood = sj.at("mood").get<double>();
            s.motor_temp = sj.value("temp", world.config().ambient_temp);
            s.clock = sj.at("clock").get<int>();
            if (s.clock < 0 || s.clock >= kTicksPerDay) throw ConfigError(where + ".clock", "outside the day");
            s.location = location(sj.at("location"), where + ".location");
            s.floor = b.floor_of(s.location);
            if (sj.contains("event") && !sj["event"].is_null()) {
                const auto& ej = sj["event"];
                UserEvent e;
                e.tick = s.clock;
                e.text = ej.at("text").get<std::string>();
                auto cat = parse_event_category(ej.at("category").get<std::string>());
                if (!cat) throw ConfigError(where + ".event.category", "unknown category");
                e.category = *cat;
                e.target = location(ej.at("target"), where + ".event.target");
                s.pending_events.push_back(e);
            }
            out.push_back(std::move(sc));
        }
    } catch (const json::exception& e) {
        throw ConfigError("scenarios", e.what());
    }
    return out;
}

std::vector<Scenario> load_scenarios(const World& world) {
    const char* env = std::getenv("PEPA_CONFIG_DIR");
    const std::filesystem::path dir = env && *env ? env : PEPA_CONFIG_DIR;
    return load_scenarios(world, dir / "scenarios.json");
}

const Scenario& find_scenario(const std::vector<Scenario>& ss, std::string_view id) {
    for (const auto& s : ss)
        if (s.id == id) return s;
    throw ConfigError("scenario", "unknown scenario '" + std::string(id) + "'");
}

std::array<int, kCategoryCount> action_preference_trial(const SimPlanner& planner, const Scenario& sc, int n,
                                                        std::uint64_t seed) {
    std::array<int, kCategoryCount> counts{};
    for (int i = 0; i < n; ++i) {
        const Action a = planner.plan(sc.state, mix_seed(seed, static_cast<std::uint64_t>(i))).action;
        ++counts[static_cast<std::size_t>(action_category(a, planner.building()))];
    }
    return counts;
}

std::pair<GoalSet, RewardSpec> evolved_spec(const PersonalityProfile& p, int days, std::uint64_t seed,
                                            const HarnessConfig& cfg) {
    if (days < 1) throw ConfigError("days", "must be at least 1");
    if (days == 1) return generate_initial_goals(p, CapabilityCatalog::standard());
    ExperimentOptions opt;
    opt.days = days - 1;
    opt.seed = seed;
    opt.mode = Mode::all_cloud_sim;
    const auto rep = run_experiment(p, opt, cfg);
    return {rep.final_goals, rep.final_spec};
}

std::vector<ComparisonRow> architecture_comparison(const std::vector<PersonalityProfile>& ps, int days,
                                                   std::uint64_t seed, const HarnessConfig& cfg) {
    if (ps.empty()) throw ConfigError("personalities", "empty");
    std::vector<ComparisonRow> rows;
    for (Mode m : {Mode::all_cloud_sim, Mode::all_edge_sim, Mode::hybrid}) {
        ComparisonRow row;
        row.mode = m;
        double ticks = 0.0;
        for (const auto& p : ps) {
            ExperimentOptions opt;
            opt.days = days;
            opt.seed = seed;
            opt.mode = m;
            const auto rep = run_experiment(p, opt, cfg);
            row.chat_calls_per_day += rep.chat_calls_per_day / ps.size();
            row.mean_decision_latency += rep.mean_decision_latency / ps.size();
            row.day3_survival_ticks.push_back(rep.days.back().survival_ticks);
            ticks += rep.days.back().survival_ticks;
        }
        row.day3_survival_hours = ticks / ps.size() / 60.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::filesystem::path> emit_figures(const std::vector<ExperimentReport>& reports,
                                                const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto dist_path = out_dir / "category_distribution.csv";
    const auto surv_path = out_dir / "survival.csv";
    std::ofstream dist(dist_path), surv(surv_path);
    if (!dist || !surv) throw std::runtime_error("cannot write figures to " + out_dir.string());
    char buf[64];
    dist << "personality,day";
    for (Category c : all_categories()) dist << ',' << to_string(c);
    dist << '\n';
    surv << "personality,day,hours\n";
    for (const auto& r : reports) {
        for (const auto& d : r.days) {
            dist << r.personality << ',' << d.day;
            for (double v : d.distribution) {
                std::snprintf(buf, sizeof buf, ",%.2f", v);
                dist << buf;
            }
            dist << '\n';
            std::snprintf(buf, sizeof buf, ",%.2f", d.survival_ticks / 60.0);
            surv << r.personality << ',' << d.day << buf << '\n';
        }
    }
    return {dist_path, surv_path};
}

}  // namespace pepa
