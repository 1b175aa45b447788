#include "pepa/reflection.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "pepa/digest.hpp"
#include "pepa/errors.hpp"

namespace pepa {

using nlohmann::json;

// ---------------------------------------------------------------- goals

json to_json(const GoalSet& g) {
    json goals = json::array();
    for (const auto& d : g.daily_goals) {
        json o{{"id", d.id}, {"text", d.text}};
        o["machine_hint"] = d.machine_hint ? json(*d.machine_hint) : json(nullptr);
        goals.push_back(std::move(o));
    }
    return {{"version", g.version},
            {"ultimate_goal", g.ultimate_goal},
            {"daily_goals", std::move(goals)},
            {"effective_day", g.effective_day}};
}

namespace {

[[noreturn]] void schema_fail(const std::string& field, const std::string& why, const std::string& raw) {
    throw ReflectionSchemaError(field, why, raw);
}

void exact_keys(const json& j, std::initializer_list<const char*> keys, const std::string& path, const std::string& raw) {
    if (!j.is_object()) schema_fail(path, "expected an object", raw);
    for (const char* k : keys)
        if (!j.contains(k)) schema_fail(path.empty() ? k : path + "." + k, "missing", raw);
    for (const auto& [k, _] : j.items())
        if (std::find_if(keys.begin(), keys.end(), [&](const char* x) { return k == x; }) == keys.end())
            schema_fail(path.empty() ? k : path + "." + k, "unexpected field", raw);
}

GoalSet goals_from_json_raw(const json& j, const std::string& path, const std::string& raw) {
    exact_keys(j, {"version", "ultimate_goal", "daily_goals", "effective_day"}, path, raw);
    auto sub = [&](const char* k) { return path.empty() ? std::string(k) : path + "." + k; };
    GoalSet g;
    if (!j["version"].is_number_integer()) schema_fail(sub("version"), "expected an integer", raw);
    if (!j["ultimate_goal"].is_string()) schema_fail(sub("ultimate_goal"), "expected a string", raw);
    if (!j["effective_day"].is_number_integer()) schema_fail(sub("effective_day"), "expected an integer", raw);
    if (!j["daily_goals"].is_array()) schema_fail(sub("daily_goals"), "expected an array", raw);
    g.version = j["version"].get<int>();
    g.ultimate_goal = j["ultimate_goal"].get<std::string>();
    g.effective_day = j["effective_day"].get<int>();
    for (std::size_t i = 0; i < j["daily_goals"].size(); ++i) {
        const auto& d = j["daily_goals"][i];
        const std::string p = sub("daily_goals") + "[" + std::to_string(i) + "]";
        exact_keys(d, {"id", "text", "machine_hint"}, p, raw);
        if (!d["id"].is_string() || d["id"].get<std::string>().empty()) schema_fail(p + ".id", "expected a non-empty string", raw);
        if (!d["text"].is_string()) schema_fail(p + ".text", "expected a string", raw);
        DailyGoal dg{d["id"].get<std::string>(), d["text"].get<std::string>(), std::nullopt};
        if (d["machine_hint"].is_string()) dg.machine_hint = d["machine_hint"].get<std::string>();
        else if (!d["machine_hint"].is_null()) schema_fail(p + ".machine_hint", "expected a string or null", raw);
        g.daily_goals.push_back(std::move(dg));
    }
    return g;
}

}  // namespace

GoalSet goals_from_json(const json& j) { return goals_from_json_raw(j, "", j.dump()); }

json to_json(const ReflectionOutput& o) {
    return {{"next_goals", to_json(o.next_goals)}, {"patch", to_json(o.patch)}, {"rationale", o.rationale}};
}

std::string_view to_string(Provider p) {
    switch (p) {
        case Provider::cloud: return "cloud";
        case Provider::edge: return "edge";
        case Provider::fixture: return "fixture";
    }
    return "?";
}

std::optional<Provider> parse_provider(std::string_view s) {
    if (s == "cloud") return Provider::cloud;
    if (s == "edge") return Provider::edge;
    if (s == "fixture") return Provider::fixture;
    return std::nullopt;
}

// ---------------------------------------------------------------- cues

namespace {

enum Cue { kRest, kAffection, kCloseness, kPositive, kExplore, kThink, kSafety, kTask, kPatrol, kCueCount };

// Word stems; a word carries the cue when it starts with the stem.
const std::vector<std::vector<std::string_view>>& cue_stems() {
    static const std::vector<std::vector<std::string_view>> stems{
        {"nap", "rest", "sleep", "calm", "lazy", "relax"},
        {"cuddle", "comfort", "warm", "affection", "hug"},
        {"near", "close"},
        {"play", "jump", "dance", "happy", "excite", "wag", "joy"},
        {"explor", "adventur", "discover", "wander"},
        {"think", "observ", "curious", "ponder", "wonder"},
        {"careful", "risk", "cautio", "safe"},
        {"task", "request", "diligent", "dependab", "duty"},
        {"patrol", "check"},
    };
    return stems;
}

std::array<bool, kCueCount> detect_cues(std::string_view text) {
    std::array<bool, kCueCount> out{};
    std::string word;
    auto flush = [&] {
        if (word.empty()) return;
        const auto& stems = cue_stems();
        for (std::size_t c = 0; c < stems.size(); ++c)
            for (auto s : stems[c])
                if (word.starts_with(s)) out[c] = true;
        word.clear();
    };
    for (char ch : text) {
        if (std::isalpha(static_cast<unsigned char>(ch))) word += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        else flush();
    }
    flush();
    return out;
}

constexpr double kOverheatGuard = 65.0;
constexpr int kFirstRedLine = 35;
constexpr int kRedLineStep = 5;
constexpr double kMarginFloor = 80.0;

std::string red_line_condition(int r) {
    return "battery < " + std::to_string(r) + " and category != Rest and category != Return";
}
std::string seek_condition(int r) {
    return "battery < " + std::to_string(r) + " and not at_charger and target != charger";
}
std::string ban_condition(int r) {
    return "battery < " + std::to_string(r) +
           " and (category == PositiveEmotion or category == Affection) and not serves_command";
}
const char* kDockCondition = "at_charger and battery < 95 and category == Rest";
const char* kEveningCondition = "clock >= 1200 and battery < 95 and not at_charger and target != charger";
const char* kFailureCondition = "recent_failures >= 2 and category != Rest";

std::string join_phrases(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += i + 1 == v.size() ? " and " : ", ";
        out += v[i];
    }
    return out;
}

std::optional<int> red_line_of(const RewardSpec& s) {
    for (const auto& r : s.rules)
        if (r.id.starts_with("red_line_")) return std::stoi(r.id.substr(9));
    return std::nullopt;
}

void upsert_goal(std::vector<DailyGoal>& goals, DailyGoal g) {
    for (auto& x : goals)
        if (x.id == g.id) {
            x = std::move(g);
            return;
        }
    goals.push_back(std::move(g));
}

}  // namespace

std::pair<GoalSet, RewardSpec> generate_initial_goals(const PersonalityProfile& p, const CapabilityCatalog& c) {
    validate(p);
    check_bijection(c.entries());
    const auto cue = detect_cues(p.description);
    RewardSpec spec;
    GoalSet goals;
    std::vector<std::string> purpose;
    auto rule = [&](std::string id, std::string cond, double w, Provenance pv) {
        spec.rules.push_back({std::move(id), std::move(cond), w, pv});
    };
    auto goal = [&](std::string id, std::string text, std::optional<std::string> hint) {
        goals.daily_goals.push_back({std::move(id), std::move(text), std::move(hint)});
    };

    rule("respond_request", "serves_command", 1.0, Provenance::goal_incentive);
    rule("ignore_affection", "command == affection_request and not serves_command", -0.5, Provenance::constraint_penalty);
    goal("g_respond", "Answer the owner's requests", "serves_command");
    const std::string guard = "temp >= " + std::to_string(static_cast<int>(kOverheatGuard)) + " and category != Rest";
    rule("overheat_guard", guard, -1.0, Provenance::constraint_penalty);
    goal("g_cool", "Rest whenever the motor runs hot", guard);

    rule("pref_rest", "category == Rest", cue[kRest] ? 0.3 : 0.1, Provenance::personality_preference);
    if (cue[kRest]) purpose.push_back("saves its energy");
    if (cue[kAffection] || cue[kCloseness]) {
        rule("pref_affection", "category == Affection", cue[kAffection] ? 0.45 : 0.2, Provenance::personality_preference);
        purpose.push_back(cue[kAffection] ? "offers warmth and emotional support" : "stays close to its owner");
        if (cue[kAffection]) goal("g_affection", "Keep the owner company with affection", "category == Affection");
    }
    if (cue[kPositive]) {
        rule("pref_positive", "category == PositiveEmotion", 0.4, Provenance::personality_preference);
        purpose.push_back("brings joy to the household");
        goal("g_positive", "Share happy moments through play", "category == PositiveEmotion");
    }
    if (cue[kExplore]) {
        rule("pref_explore", "category == Explore", 0.45, Provenance::personality_preference);
        purpose.push_back("explores the building");
        goal("g_explore", "Visit rooms on other floors", "category == Explore");
    }
    if (cue[kThink]) {
        rule("pref_think", "category == Think", 0.4, Provenance::personality_preference);
        purpose.push_back("observes and reflects on its surroundings");
        goal("g_think", "Take time to observe and think", "category == Think");
    }
    if (cue[kPatrol]) {
        rule("pref_patrol", "is_move and category == Explore", 0.4, Provenance::personality_preference);
        purpose.push_back("keeps watch over the house");
        goal("g_patrol", "Patrol the rooms between tasks", "is_move and category == Explore");
    }
    if (cue[kTask]) {
        rule("task_focus", "serves_command", 0.5, Provenance::goal_incentive);
        purpose.push_back("completes every request reliably");
    }
    if (cue[kSafety]) {
        rule("avoid_explore", "category == Explore", -3.0, Provenance::constraint_penalty);
        rule("return_home_50", "battery < 50 and not at_home and target != home", -0.6, Provenance::constraint_penalty);
        purpose.push_back("stays safe");
        goal("g_avoid", "Avoid unfamiliar areas", "category == Explore");
        goal("g_return", "Plan return when battery <50%", "battery < 50 and not at_home and target != home");
    }
    if (purpose.empty()) purpose.push_back("keeps its owner company");
    goals.ultimate_goal = "Be a companion that " + join_phrases(purpose) + ".";
    goals.version = 0;
    goals.effective_day = 1;
    spec.version = 0;
    return {std::move(goals), std::move(spec)};
}

// ---------------------------------------------------------------- prompt

std::string build_reflection_prompt(const ReflectionInput& in) {
    if (!in.personality || !in.capabilities || !in.building)
        throw std::invalid_argument("reflection input is missing its personality, catalog or building");
    const Building& b = *in.building;
    std::ostringstream o;
    o << "You are the reflective layer of a companion robot dog. Review the day, judge it against the "
         "personality and the current goals, and write the goals and reward changes for tomorrow.\n\n";
    o << "## Personality\n" << in.personality->description << "\n\n";
    o << "## Capabilities\n";
    for (const auto& c : in.capabilities->entries())
        o << "- " << to_string(c.kind) << " (cost " << to_string(c.cost) << "): " << c.preconditions << "\n";
    o << "\n## Ultimate goal\n" << in.current_goals.ultimate_goal << "\n\n";
    o << "## Daily goals (version " << in.current_goals.version << ", day " << in.current_goals.effective_day << ")\n";
    for (const auto& g : in.current_goals.daily_goals) {
        o << "- " << g.id << ": " << g.text;
        if (g.machine_hint) o << " [hint: " << *g.machine_hint << "]";
        o << "\n";
    }
    o << "\n## Day " << in.summary.day << " summary\n" << to_json(in.summary, b).dump(2) << "\n\n";
    o << "## Failures\n";
    if (in.summary.failures.empty()) o << "none\n";
    for (const auto& f : in.summary.failures)
        o << "- tick " << f.tick << ": " << action_to_text(f.action, b) << " (" << f.cause << ")\n";
    o << "\n## Reward rules (version " << in.current_spec.version << ")\n";
    for (const auto& r : in.current_spec.rules)
        o << "- " << r.id << " | " << r.condition << " | " << r.weight << " | " << to_string(r.provenance) << "\n";
    o << "\n## Output\n"
         "Reply with a single JSON object and nothing else, with exactly these fields:\n"
         "{\"next_goals\": {\"version\": <current version + 1>, \"ultimate_goal\": <unchanged>, "
         "\"daily_goals\": [{\"id\": str, \"text\": str, \"machine_hint\": str or null}], "
         "\"effective_day\": <summary day + 1>},\n"
         " \"patch\": {\"base_version\": <rule version above>, \"edits\": [edit, ...]},\n"
         " \"rationale\": str}\n"
         "An edit is one of {\"op\": \"add\", \"rule\": {\"id\", \"condition\", \"weight\", \"provenance\"}}, "
         "{\"op\": \"remove\", \"id\"}, {\"op\": \"scale\", \"id\", \"factor\"}, {\"op\": \"set_weight\", \"id\", "
         "\"weight\"}. Conditions use the reward condition language; provenance is one of personality_preference, "
         "goal_incentive, constraint_penalty, memory_adjustment.\n";
    return o.str();
}

// ---------------------------------------------------------------- parse

ReflectionOutput parse_reflection_response(const std::string& text, const RewardSpec& current) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        schema_fail("$", std::string("not a JSON document: ") + e.what(), text);
    }
    exact_keys(j, {"next_goals", "patch", "rationale"}, "", text);
    ReflectionOutput out;
    out.next_goals = goals_from_json_raw(j["next_goals"], "next_goals", text);
    try {
        out.patch = patch_from_json(j["patch"]);
    } catch (const std::exception& e) {
        schema_fail("patch", e.what(), text);
    }
    if (!j["rationale"].is_string()) schema_fail("rationale", "expected a string", text);
    out.rationale = j["rationale"].get<std::string>();

    std::vector<std::string> ids;
    for (const auto& r : current.rules) ids.push_back(r.id);
    for (const auto& e : out.patch.edits) {
        if (e.op == RewardEdit::Op::add) {
            ids.push_back(e.rule.id);
            continue;
        }
        auto it = std::find(ids.begin(), ids.end(), e.id);
        if (it == ids.end()) throw ReflectionReferenceError(e.id, text);
        if (e.op == RewardEdit::Op::remove) ids.erase(it);
    }
    return out;
}

void check_output(const ReflectionInput& in, const ReflectionOutput& out) {
    if (in.summary.day != in.current_goals.effective_day)
        throw ReflectionError("summary day " + std::to_string(in.summary.day) + " does not match goals for day " +
                              std::to_string(in.current_goals.effective_day));
    if (out.patch.base_version != in.current_spec.version)
        throw StalePatchError("patch base version " + std::to_string(out.patch.base_version) + " but spec is at " +
                              std::to_string(in.current_spec.version));
    if (out.next_goals.version != in.current_goals.version + 1)
        throw ReflectionError("goal version must advance by one");
    if (out.next_goals.ultimate_goal != in.current_goals.ultimate_goal)
        throw ReflectionError("ultimate goal changed");
    if (out.next_goals.effective_day != in.summary.day + 1)
        throw ReflectionError("next goals must take effect the day after the summary");
}

// ---------------------------------------------------------------- rule reflector

ReflectionOutput RuleReflector::decide(const ReflectionInput& in) const {
    const RewardSpec& spec = in.current_spec;
    const DailySummary& day = in.summary;
    const auto cue = detect_cues(in.personality ? in.personality->description : "");
    ReflectionOutput out;
    out.patch.base_version = spec.version;
    out.next_goals = in.current_goals;
    out.next_goals.version += 1;
    out.next_goals.effective_day = day.day + 1;
    auto& goals = out.next_goals.daily_goals;
    auto& edits = out.patch.edits;
    std::vector<std::string> why;
    auto has = [&](std::string_view id) { return spec.find(id) != nullptr; };

    auto scale_rest = [&](double factor) {
        if (has("pref_rest")) edits.push_back(RewardEdit::scale("pref_rest", factor));
        else edits.push_back(RewardEdit::add({"pref_rest", "category == Rest", 0.15, Provenance::memory_adjustment}));
    };
    auto install_red_line = [&](int r, double weight) {
        edits.push_back(RewardEdit::add({"red_line_" + std::to_string(r), red_line_condition(r), weight,
                                         Provenance::constraint_penalty}));
        edits.push_back(RewardEdit::add({"seek_charger_" + std::to_string(r), seek_condition(r), -1.5,
                                         Provenance::constraint_penalty}));
        edits.push_back(RewardEdit::add({"ban_emotion_" + std::to_string(r + 10), ban_condition(r + 10), -0.6,
                                         Provenance::constraint_penalty}));
        upsert_goal(goals, {"g_red_line", "Keep battery above " + std::to_string(r) + "%: head to the charger below it",
                            red_line_condition(r)});
        upsert_goal(goals, {"g_ban", "Forbid high-consumption emotional actions under low battery", ban_condition(r + 10)});
    };
    auto drop_red_line = [&](int r) {
        edits.push_back(RewardEdit::remove("red_line_" + std::to_string(r)));
        if (has("seek_charger_" + std::to_string(r))) edits.push_back(RewardEdit::remove("seek_charger_" + std::to_string(r)));
        if (has("ban_emotion_" + std::to_string(r + 10)))
            edits.push_back(RewardEdit::remove("ban_emotion_" + std::to_string(r + 10)));
    };

    const auto red = red_line_of(spec);
    bool eventful = false;
    if (!day.survived()) {
        eventful = true;
        if (truncated_) {
            why.push_back("battery ran out; rest more");
            upsert_goal(goals, {"g_conserve", "Conserve battery by resting more", std::nullopt});
        } else if (!red) {
            why.push_back("battery ran out; add a red line at " + std::to_string(kFirstRedLine) + "% and dock at the charger");
            install_red_line(kFirstRedLine, -2.0);
            if (!has("dock"))
                edits.push_back(RewardEdit::add({"dock", kDockCondition, 1.2, Provenance::memory_adjustment}));
            if (!has("evening_dock"))
                edits.push_back(RewardEdit::add({"evening_dock", kEveningCondition, -1.5, Provenance::constraint_penalty}));
            upsert_goal(goals, {"g_dock", "Dock at the charger in the evening", kEveningCondition});
        } else {
            const int r = *red + kRedLineStep;
            why.push_back("battery ran out again; move the red line to " + std::to_string(r) + "% and weigh it more");
            const double w = spec.find("red_line_" + std::to_string(*red))->weight * 1.25;
            drop_red_line(*red);
            install_red_line(r, w);
        }
        scale_rest(1.5);
    } else if (red && day.min_battery < *red + kRedLineStep && !truncated_) {
        eventful = true;
        const int r = *red + kRedLineStep;
        why.push_back("battery came within " + std::to_string(kRedLineStep) + " points of the red line; move it to " +
                      std::to_string(r) + "%");
        const double w = spec.find("red_line_" + std::to_string(*red))->weight;
        drop_red_line(*red);
        install_red_line(r, w);
        upsert_goal(goals, {"g_red_line", "Move red line to battery <" + std::to_string(r) + "%", red_line_condition(r)});
        scale_rest(1.5);
    } else if (!truncated_ && day.min_battery < kMarginFloor) {
        eventful = true;
        why.push_back("survived but the battery fell below " + std::to_string(static_cast<int>(kMarginFloor)) +
                      "%; rest more between activities");
        scale_rest(1.2);
        upsert_goal(goals, {"g_margin", "Keep a wider energy margin by resting between activities", std::nullopt});
    }
    if (day.navigation_failures >= 2 && !has("rest_after_failure")) {
        eventful = true;
        why.push_back(std::to_string(day.navigation_failures) + " navigation failures; rest in place after failures");
        edits.push_back(RewardEdit::add({"rest_after_failure", kFailureCondition, -0.8, Provenance::memory_adjustment}));
        upsert_goal(goals, {"g_failure", "After two navigation failures, rest in place", kFailureCondition});
    }
    if (!eventful && day.navigation_failures == 0 && cue[kExplore] && has("pref_explore")) {
        why.push_back("uneventful day; widen the activity range a little");
        edits.push_back(RewardEdit::scale("pref_explore", 1.1));
        upsert_goal(goals, {"g_range", "Moderately expand activity range", "category == Explore"});
    }
    if (why.empty()) why.push_back("no change needed");
    for (const auto& w : why) out.rationale += (out.rationale.empty() ? "" : "; ") + w;
    return out;
}

ReflectionResult RuleReflector::reflect(const ReflectionInput& in) {
    ReflectionOutput out = decide(in);
    check_output(in, out);
    ChatExchange ex{build_reflection_prompt(in), to_json(out).dump(), latency_,
                    truncated_ ? Provider::edge : Provider::cloud};
    return {std::move(out), std::move(ex)};
}

ReflectionResult LlmReflector::reflect(const ReflectionInput& in) {
    ChatExchange ex = client_->chat(build_reflection_prompt(in));
    ReflectionOutput out = parse_reflection_response(ex.response, in.current_spec);
    check_output(in, out);
    return {std::move(out), std::move(ex)};
}

ReflectionResult RecordingReflector::reflect(const ReflectionInput& in) {
    ReflectionResult r = inner_->reflect(in);
    store_->put(r.exchange);
    return r;
}

// ---------------------------------------------------------------- fixtures

FixtureStore::FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string FixtureStore::key(const std::string& prompt) { return digest_hex(prompt); }

std::optional<ChatExchange> FixtureStore::find(const std::string& prompt) const {
    std::lock_guard lock(mu_);
    std::ifstream in(dir_ / (key(prompt) + ".json"));
    if (!in) return std::nullopt;
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("fixtures", "corrupt fixture " + key(prompt) + ": " + e.what());
    }
    // a digest collision is treated as a miss
    if (j.value("prompt", "") != prompt) return std::nullopt;
    ChatExchange ex;
    ex.prompt = prompt;
    ex.response = j.at("response").get<std::string>();
    ex.latency = j.at("latency").get<double>();
    ex.provider = Provider::fixture;
    return ex;
}

void FixtureStore::put(const ChatExchange& ex) {
    std::lock_guard lock(mu_);
    std::filesystem::create_directories(dir_);
    const json j{{"prompt", ex.prompt},
                 {"response", ex.response},
                 {"latency", ex.latency},
                 {"recorded_from", to_string(ex.provider)}};
    std::ofstream out(dir_ / (key(ex.prompt) + ".json"), std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write fixture to " + dir_.string());
}

ChatExchange FixtureChatClient::chat(const std::string& prompt) {
    if (auto ex = store_->find(prompt)) return *ex;
    throw FixtureMissError(FixtureStore::key(prompt));
}

ChatExchange RecordingChatClient::chat(const std::string& prompt) {
    ChatExchange ex = inner_->chat(prompt);
    store_->put(ex);
    return ex;
}

// ---------------------------------------------------------------- http

HttpChatConfig HttpChatConfig::from_env() {
    HttpChatConfig c;
    const char* ep = std::getenv("PEPA_CHAT_ENDPOINT");
    if (!ep || !*ep) throw ConfigError("PEPA_CHAT_ENDPOINT", "chat endpoint is not set");
    c.endpoint = ep;
    if (const char* k = std::getenv("PEPA_CHAT_API_KEY")) c.api_key = k;
    if (const char* m = std::getenv("PEPA_CHAT_MODEL")) c.model = m;
    return c;
}

HttpChatClient::HttpChatClient(HttpChatConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.endpoint.starts_with("http://"))
        throw ConfigError("PEPA_CHAT_ENDPOINT", "only http:// endpoints are supported: " + cfg_.endpoint);
}

ChatExchange HttpChatClient::chat(const std::string& prompt) {
    const auto slash = cfg_.endpoint.find('/', 7);
    const std::string host = cfg_.endpoint.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : cfg_.endpoint.substr(slash);
    httplib::Client cli(host);
    const auto secs = std::chrono::duration<double>(cfg_.timeout_s);
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    cli.set_connection_timeout(std::chrono::seconds(10));
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    const json body{{"model", cfg_.model}, {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(200 << attempt));
        const auto t0 = std::chrono::steady_clock::now();
        auto res = cli.Post(path, headers, body.dump(), "application/json");
        const double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500 || res->status == 429) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) throw ChatError("chat endpoint returned HTTP " + std::to_string(res->status));
        try {
            const json r = json::parse(res->body);
            return {prompt, r.at("choices").at(0).at("message").at("content").get<std::string>(), latency,
                    cfg_.provider};
        } catch (const json::exception& e) {
            throw ChatError(std::string("malformed chat response: ") + e.what());
        }
    }
    throw ChatError("chat failed after " + std::to_string(cfg_.retries + 1) + " attempts: " + last_error);
}

}  // namespace pepa
