#include "pepa/memory.hpp"

#include <algorithm>

#include "pepa/digest.hpp"

namespace pepa {

using nlohmann::json;

std::optional<std::string> context_value(const EpisodicRecord& r, std::string_view key) {
    for (const auto& tag : r.context) {
        if (tag.size() > key.size() && tag.compare(0, key.size(), key) == 0 && tag[key.size()] == '=')
            return tag.substr(key.size() + 1);
    }
    return std::nullopt;
}

int DailySummary::total_actions() const {
    int n = 0;
    for (const auto& [_, c] : action_counts) n += c;
    return n;
}

json to_json(const DailySummary& s, const Building& b) {
    json counts = json::object();
    for (const auto& [c, n] : s.action_counts) counts[std::string(to_string(c))] = n;
    json failures = json::array();
    for (const auto& f : s.failures)
        failures.push_back({{"tick", f.tick}, {"action", action_to_text(f.action, b)}, {"cause", f.cause}});
    json terminal = s.battery_depleted_at_tick ? json{{"battery_depleted_at_tick", *s.battery_depleted_at_tick}}
                                               : json("survived");
    return {{"day", s.day},
            {"action_counts_by_category", counts},
            {"failures", failures},
            {"terminal_outcome", terminal},
            {"energy_profile", {{"min_battery", s.min_battery}, {"final_battery", s.final_battery}}},
            {"final_tick", s.final_tick},
            {"requests_completed", s.requests_completed},
            {"navigation_failures", s.navigation_failures},
            {"notable_events", s.notable_events}};
}

std::string summary_digest(const DailySummary& s, const Building& b) { return digest_hex(to_json(s, b).dump()); }

bool MemoryQuery::matches(const EpisodicRecord& r) const {
    if (first_day && r.day < *first_day) return false;
    if (last_day && r.day > *last_day) return false;
    if (!categories.empty() && !categories.count(r.category)) return false;
    if (!outcomes.empty() && !outcomes.count(r.outcome)) return false;
    return true;
}

json record_to_json(const EpisodicRecord& r, const Building& b) {
    json action = action_to_json(r.action, b);
    action["category"] = to_string(r.category);
    return {{"id", r.id},
            {"day", r.day},
            {"tick", r.tick},
            {"action", action},
            {"pre_state", state_to_json(r.pre_state)},
            {"post_state", state_to_json(r.post_state)},
            {"outcome", to_string(r.outcome)},
            {"resources",
             {{"time", r.resources.time}, {"energy", r.resources.energy}, {"charge_gain", r.resources.charge_gain}}},
            {"context", r.context}};
}

EpisodicRecord record_from_json(const json& j) {
    static const std::set<std::string> kKeys = {"id",         "day",     "tick",      "action", "pre_state",
                                                "post_state", "outcome", "resources", "context"};
    if (!j.is_object()) throw std::invalid_argument("record is not an object");
    for (const auto& k : kKeys)
        if (!j.contains(k)) throw std::invalid_argument("missing field '" + k + "'");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!kKeys.count(it.key())) throw std::invalid_argument("unexpected field '" + it.key() + "'");
    EpisodicRecord r;
    r.id = j["id"].get<std::uint64_t>();
    r.day = j["day"].get<int>();
    r.tick = j["tick"].get<int>();
    r.action = action_from_json(j["action"]);
    const auto cat = parse_category(j["action"].at("category").get<std::string>());
    if (!cat) throw std::invalid_argument("unknown category");
    r.category = *cat;
    r.pre_state = state_from_json(j["pre_state"]);
    r.post_state = state_from_json(j["post_state"]);
    const auto out = parse_outcome(j["outcome"].get<std::string>());
    if (!out) throw std::invalid_argument("unknown outcome");
    r.outcome = *out;
    const auto& res = j["resources"];
    r.resources.time = res.at("time").get<int>();
    r.resources.energy = res.at("energy").get<double>();
    r.resources.charge_gain = res.at("charge_gain").get<double>();
    r.context = j["context"].get<std::vector<std::string>>();
    return r;
}

namespace {

json header() { return {{"schema", kMemorySchema}, {"version", kMemorySchemaVersion}}; }

std::vector<EpisodicRecord> read_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open memory log " + path.string());
    std::vector<EpisodicRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw LogParseError(n, e.what());
        }
        if (n == 1) {
            if (!j.is_object() || j.value("schema", "") != kMemorySchema)
                throw LogParseError(1, "missing schema header");
            if (j.value("version", 0) != kMemorySchemaVersion) throw LogParseError(1, "unsupported schema version");
            continue;
        }
        try {
            out.push_back(record_from_json(j));
        } catch (const std::exception& e) {
            throw LogParseError(n, e.what());
        }
        if (out.back().id != out.size()) throw LogParseError(n, "id out of sequence");
    }
    return out;
}

}  // namespace

MemoryStore MemoryStore::load(const Building& building, const std::filesystem::path& path) {
    MemoryStore m(building);
    m.records_ = read_log(path);
    return m;
}

MemoryStore MemoryStore::open(const Building& building, const std::filesystem::path& path) {
    MemoryStore m(building);
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    if (!fresh) m.records_ = read_log(path);
    m.sink_ = std::make_shared<std::ofstream>(path, std::ios::app);
    if (!*m.sink_) throw std::runtime_error("cannot open memory log " + path.string() + " for writing");
    if (fresh) *m.sink_ << header().dump() << '\n' << std::flush;
    return m;
}

void MemoryStore::persist(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write memory log " + path.string());
    out << header().dump() << '\n';
    for (const auto& r : records_) out << record_to_json(r, *building_).dump() << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void MemoryStore::record(const EpisodicRecord& rec) {
    if (rec.id != last_id() + 1)
        throw SequencingError("record id " + std::to_string(rec.id) + " does not follow " + std::to_string(last_id()));
    if (!records_.empty()) {
        const auto& prev = records_.back();
        if (rec.day < prev.day || (rec.day == prev.day && rec.tick < prev.tick))
            throw SequencingError("record " + std::to_string(rec.id) + " goes back in time");
    }
    if (sink_) append_line(rec);
    records_.push_back(rec);
}

void MemoryStore::append_line(const EpisodicRecord& rec) {
    *sink_ << record_to_json(rec, *building_).dump() << '\n' << std::flush;
    if (!*sink_) throw std::runtime_error("memory log append failed");
}

std::vector<int> MemoryStore::days() const {
    std::vector<int> out;
    for (const auto& r : records_)
        if (out.empty() || out.back() != r.day) out.push_back(r.day);
    return out;
}

DailySummary MemoryStore::summarize_day(int day) const {
    DailySummary s;
    s.day = day;
    for (auto c : all_categories()) s.action_counts[c] = 0;
    const EpisodicRecord* last = nullptr;
    bool low_noted = false;
    for (const auto& r : records_) {
        if (r.day != day) continue;
        if (!last) s.min_battery = r.pre_state.battery();
        last = &r;
        ++s.action_counts[r.category];
        if (r.outcome == Outcome::failure) {
            s.failures.push_back({r.tick, r.action, context_value(r, "cause").value_or("")});
            if (r.action.is_move()) ++s.navigation_failures;
        }
        s.min_battery = std::min(s.min_battery, r.post_state.battery());
        const int done = r.post_state.requests_completed - r.pre_state.requests_completed;
        s.requests_completed += done;
        for (const auto& e : r.post_state.pending_events)
            if (std::find(r.pre_state.pending_events.begin(), r.pre_state.pending_events.end(), e) ==
                r.pre_state.pending_events.end())
                s.notable_events.push_back("tick " + std::to_string(e.tick) + ": request \"" + e.text + "\"");
        if (done > 0) s.notable_events.push_back("tick " + std::to_string(r.post_state.clock) + ": request completed");
        if (!low_noted && r.post_state.battery() < 20.0) {
            low_noted = true;
            s.notable_events.push_back("tick " + std::to_string(r.post_state.clock) + ": battery below 20%");
        }
    }
    if (!last) throw NoDataError("no records for day " + std::to_string(day));
    s.final_battery = last->post_state.battery();
    s.final_tick = last->post_state.clock;
    if (last->post_state.battery_units <= 0) s.battery_depleted_at_tick = last->post_state.clock;
    return s;
}

std::vector<EpisodicRecord> MemoryStore::retrieve(const MemoryQuery& q) const {
    std::vector<EpisodicRecord> out;
    for (const auto& r : records_)
        if (q.matches(r)) out.push_back(r);
    return out;
}

void LongTermTrace::append(TraceEntry e) {
    if (e.day != static_cast<int>(entries_.size()) + 1)
        throw SequencingError("trace entry for day " + std::to_string(e.day) + " out of order");
    entries_.push_back(std::move(e));
}

json LongTermTrace::to_json() const {
    json out = json::array();
    for (const auto& e : entries_)
        out.push_back({{"day", e.day},
                       {"goals_version", e.goals_version},
                       {"spec_version", e.spec_version},
                       {"summary_digest", e.summary_digest}});
    return out;
}

}  // namespace pepa
