// Command line front end for experiments, trials and checks.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pepa/distill.hpp"
#include "pepa/errors.hpp"
#include "pepa/harness.hpp"
#include "pepa/oee.hpp"
#include "pepa/personality.hpp"
#include "pepa/reflection.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pepa;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kFixtureMiss = 3, kInvariant = 4 };

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open");
    return json::parse(in);
}

std::vector<json> read_json_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open");
    std::vector<json> out;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

// Every subcommand other than run leaves the same small manifest.
void write_manifest(const fs::path& dir, const std::string& command, json params, const std::vector<std::string>& files) {
    write_json(dir / "manifest.json",
               {{"schema", "pepa.run"}, {"version", 1}, {"command", command}, {"params", std::move(params)}, {"files", files}});
}

HarnessConfig harness_config(const std::string& sim_path) {
    HarnessConfig cfg;
    if (!sim_path.empty()) cfg.sim = load_sim_config(sim_path);
    return cfg;
}

std::vector<PersonalityProfile> prototypes(const std::string& path) {
    return path.empty() ? load_prototypes() : load_prototypes(path);
}

Mode mode_arg(const std::string& s) {
    const auto m = parse_mode(s);
    if (!m) throw ConfigError("mode", "expected all_cloud_sim, all_edge_sim or hybrid, got " + s);
    return *m;
}

json counts_json(const std::array<int, kCategoryCount>& counts) {
    json j = json::object();
    for (Category c : all_categories()) j[std::string(to_string(c))] = counts[static_cast<std::size_t>(c)];
    return j;
}

struct Common {
    std::string sim_config;
    std::string personalities;
    std::uint64_t seed = 1;
    std::string run_dir;
};

void add_common(CLI::App* cmd, Common& c, bool needs_dir = true) {
    cmd->add_option("--sim-config", c.sim_config, "simulator calibration JSON (default: shipped)");
    cmd->add_option("--personalities", c.personalities, "prototype file (default: shipped)");
    cmd->add_option("--seed", c.seed, "experiment seed")->capture_default_str();
    auto* o = cmd->add_option("--run-dir", c.run_dir, "output directory");
    if (needs_dir) o->required();
}

int cmd_run(const Common& c, const std::string& personality, int days, const std::string& mode,
            const std::string& reflector, const std::string& fixture_dir, bool record) {
    const auto ps = prototypes(c.personalities);
    ExperimentOptions opt;
    opt.days = days;
    opt.seed = c.seed;
    opt.mode = mode_arg(mode);
    const auto rk = parse_reflector_kind(reflector);
    if (!rk) throw ConfigError("reflector", "expected rule, llm or fixture, got " + reflector);
    opt.reflector = *rk;
    if (!fixture_dir.empty()) opt.fixture_dir = fixture_dir;
    opt.record_fixtures = record;
    opt.run_dir = c.run_dir;
    const auto rep = run_experiment(find_profile(ps, personality), opt, harness_config(c.sim_config));
    for (const auto& d : rep.days)
        std::cout << "day " << d.day << ": survival " << d.survival_ticks << " ticks, final battery "
                  << d.final_battery << "%\n";
    std::cout << "report: " << (fs::path(c.run_dir) / "report.json").string() << '\n';
    return kOk;
}

int cmd_preference(const Common& c, const std::string& personality, const std::string& scenario, int n,
                   int spec_days, const std::string& scenarios_path) {
    if (n < 1) throw ConfigError("n", "must be at least 1");
    const auto cfg = harness_config(c.sim_config);
    const auto ps = prototypes(c.personalities);
    const auto& p = find_profile(ps, personality);
    const World world(cfg.sim);
    const auto scenarios = scenarios_path.empty() ? load_scenarios(world) : load_scenarios(world, scenarios_path);
    const auto& sc = find_scenario(scenarios, scenario);
    const auto [goals, spec] = evolved_spec(p, spec_days, c.seed, cfg);
    const SimPlanner planner(cfg.sim, spec, cfg.planner, cfg.oracle);
    const auto counts = action_preference_trial(planner, sc, n, c.seed);
    for (Category cat : all_categories())
        std::cout << to_string(cat) << ' ' << counts[static_cast<std::size_t>(cat)] << '/' << n << '\n';
    const fs::path dir = c.run_dir;
    fs::create_directories(dir);
    write_json(dir / "preference.json", {{"schema", "pepa.preference"},
                                         {"version", 1},
                                         {"personality", p.name},
                                         {"scenario", sc.id},
                                         {"trials", n},
                                         {"spec_version", spec.version},
                                         {"counts", counts_json(counts)}});
    write_manifest(dir, "preference",
                   {{"personality", p.name}, {"scenario", sc.id}, {"n", n}, {"spec_days", spec_days}, {"seed", c.seed}},
                   {"manifest.json", "preference.json"});
    return kOk;
}

int cmd_compare(const Common& c, int days) {
    const auto rows = architecture_comparison(prototypes(c.personalities), days, c.seed, harness_config(c.sim_config));
    json out = json::array();
    for (const auto& r : rows) {
        std::cout << to_string(r.mode) << ": calls/day " << r.chat_calls_per_day << ", latency "
                  << r.mean_decision_latency << " s, day-" << days << " survival " << r.day3_survival_hours << " h\n";
        out.push_back({{"mode", std::string(to_string(r.mode))},
                       {"chat_calls_per_day", r.chat_calls_per_day},
                       {"mean_decision_latency", r.mean_decision_latency},
                       {"last_day_survival_hours", r.day3_survival_hours},
                       {"last_day_survival_ticks", r.day3_survival_ticks}});
    }
    const fs::path dir = c.run_dir;
    fs::create_directories(dir);
    write_json(dir / "comparison.json", {{"schema", "pepa.comparison"}, {"version", 1}, {"days", days}, {"rows", out}});
    write_manifest(dir, "compare", {{"days", days}, {"seed", c.seed}}, {"manifest.json", "comparison.json"});
    return kOk;
}

int cmd_oee(const Common& c) {
    const auto cfg = harness_config(c.sim_config);
    const World world(cfg.sim);
    const fs::path dir = c.run_dir;
    const auto memory = MemoryStore::load(world.building(), dir / "memory.jsonl");
    std::vector<RewardSpec> specs;
    for (const auto& j : read_json_lines(dir / "specs.jsonl")) specs.push_back(spec_from_json(j));
    const auto trajectories = trajectories_from_log(memory.records(), world.building());
    const auto report = oee_check(trajectories, specs);
    const json j = to_json(report);
    write_json(dir / "oee.json", j);
    std::cout << j.dump(2) << '\n';
    return kOk;
}

int cmd_distill(const Common& c, const std::string& personality, int states, std::uint64_t test_seed) {
    const auto cfg = harness_config(c.sim_config);
    const auto ps = prototypes(c.personalities);
    const auto& p = find_profile(ps, personality);
    const auto [goals, spec] = generate_initial_goals(p, CapabilityCatalog::standard());
    const SimPlanner teacher(cfg.sim, spec, cfg.planner, cfg.oracle);
    CollectConfig cc;
    cc.states = states;
    cc.seed = c.seed;
    const Dataset train = collect_dataset(teacher, cfg.sim, cc);
    cc.seed = test_seed;
    const Dataset test = collect_dataset(teacher, cfg.sim, cc);
    TrainConfig tc;
    tc.seed = c.seed;
    const DistilledPolicy policy = train_distilled(train, teacher, tc);
    const double agree = agreement(policy, test, teacher);
    int invalid = 0;
    for (const auto& ex : test.examples)
        if (!valid_bio(policy.predict(ex.state, teacher.building(), teacher).tags)) ++invalid;
    std::cout << "agreement " << agree << " on " << test.examples.size() << " held-out states, invalid BIO "
              << invalid << '\n';
    const fs::path dir = c.run_dir;
    fs::create_directories(dir);
    save_dataset(train, teacher.building(), dir / "train.jsonl");
    save_dataset(test, teacher.building(), dir / "test.jsonl");
    policy.save(dir / "policy.json");
    write_json(dir / "distill.json", {{"schema", "pepa.distill"},
                                      {"version", 1},
                                      {"personality", p.name},
                                      {"train_states", train.examples.size()},
                                      {"test_states", test.examples.size()},
                                      {"agreement", agree},
                                      {"invalid_bio", invalid}});
    write_manifest(dir, "distill",
                   {{"personality", p.name}, {"states", states}, {"seed", c.seed}, {"test_seed", test_seed}},
                   {"manifest.json", "train.jsonl", "test.jsonl", "policy.json", "distill.json"});
    return kOk;
}

int cmd_emit_figures(const std::vector<std::string>& reports, const std::string& out) {
    std::vector<ExperimentReport> rs;
    for (const auto& r : reports) {
        fs::path path = r;
        if (fs::is_directory(path)) path /= "report.json";
        rs.push_back(report_from_json(read_json(path)));
    }
    for (const auto& path : emit_figures(rs, out)) std::cout << path.string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Personality-driven agent experiments"};
    app.require_subcommand(1);

    Common common;
    std::string personality = "Lazy", mode = "hybrid", reflector = "rule", fixture_dir, scenario, scenarios_path;
    int days = 3, n = 10, spec_days = 3, states = 500;
    bool record = false;
    std::uint64_t test_seed = 99;
    std::vector<std::string> reports;
    std::string out_dir;

    auto* run = app.add_subcommand("run", "multi-day experiment with daily reflection");
    add_common(run, common);
    run->add_option("--personality", personality)->capture_default_str();
    run->add_option("--days", days)->capture_default_str();
    run->add_option("--mode", mode, "all_cloud_sim | all_edge_sim | hybrid")->capture_default_str();
    run->add_option("--reflector", reflector, "rule | llm | fixture")->capture_default_str();
    run->add_option("--fixture-dir", fixture_dir, "fixture store for replay or capture");
    run->add_flag("--record-fixtures", record, "capture reflection exchanges into --fixture-dir");

    auto* pref = app.add_subcommand("preference", "repeated planner trials on a fixed scenario");
    add_common(pref, common);
    pref->add_option("--personality", personality)->capture_default_str();
    pref->add_option("--scenario", scenario, "A, B or C")->required();
    pref->add_option("-n,--trials", n)->capture_default_str();
    pref->add_option("--spec-days", spec_days, "use the spec held on this day")->capture_default_str();
    pref->add_option("--scenarios", scenarios_path, "scenario file (default: shipped)");

    auto* cmp = app.add_subcommand("compare", "architecture comparison over all personalities");
    add_common(cmp, common);
    cmp->add_option("--days", days)->capture_default_str();

    auto* oee = app.add_subcommand("oee", "recurrence check over a finished run directory");
    add_common(oee, common);

    auto* dist = app.add_subcommand("distill", "collect, train and evaluate a distilled policy");
    add_common(dist, common);
    dist->add_option("--personality", personality)->capture_default_str();
    dist->add_option("--states", states, "states per dataset")->capture_default_str();
    dist->add_option("--test-seed", test_seed, "held-out collection seed")->capture_default_str();

    auto* fig = app.add_subcommand("emit-figures", "figure tables from saved reports");
    fig->add_option("reports", reports, "report.json files or run directories")->required();
    fig->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return cmd_run(common, personality, days, mode, reflector, fixture_dir, record);
        if (*pref) return cmd_preference(common, personality, scenario, n, spec_days, scenarios_path);
        if (*cmp) return cmd_compare(common, days);
        if (*oee) return cmd_oee(common);
        if (*dist) return cmd_distill(common, personality, states, test_seed);
        if (*fig) return cmd_emit_figures(reports, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kConfig;
    } catch (const ProfileError& e) {
        std::cerr << e.what() << '\n';
        return kConfig;
    } catch (const FixtureMissError& e) {
        std::cerr << e.what() << '\n';
        return kFixtureMiss;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violated: " << e.what() << '\n';
        return kInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
