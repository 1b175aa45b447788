#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pepa/world.hpp"

namespace pepa {

inline constexpr std::string_view kMemorySchema = "pepa.episodic";
inline constexpr int kMemorySchemaVersion = 1;

struct RecordResources {
    int time = 1;
    double energy = 0.0;       // battery percent consumed
    double charge_gain = 0.0;  // battery percent gained
    friend bool operator==(const RecordResources&, const RecordResources&) = default;
};

/// One executed action. `context` holds free-text tags; tags of the form
/// "key=value" are read back with context_value().
struct EpisodicRecord {
    std::uint64_t id = 0;
    int day = 1;
    int tick = 0;
    Action action;
    Category category = Category::Rest;
    WorldState pre_state;
    WorldState post_state;
    Outcome outcome = Outcome::success;
    RecordResources resources;
    std::vector<std::string> context;

    friend bool operator==(const EpisodicRecord&, const EpisodicRecord&) = default;
};

std::optional<std::string> context_value(const EpisodicRecord& r, std::string_view key);

struct FailureEntry {
    int tick = 0;
    Action action;
    std::string cause;
    friend bool operator==(const FailureEntry&, const FailureEntry&) = default;
};

struct DailySummary {
    int day = 1;
    std::map<Category, int> action_counts;  // every category present, possibly 0
    std::vector<FailureEntry> failures;
    std::optional<int> battery_depleted_at_tick;  // nullopt: survived
    double min_battery = 100.0;
    double final_battery = 100.0;
    int final_tick = 0;  // clock after the last record
    int requests_completed = 0;
    int navigation_failures = 0;
    std::vector<std::string> notable_events;

    bool survived() const { return !battery_depleted_at_tick.has_value(); }
    int total_actions() const;
    friend bool operator==(const DailySummary&, const DailySummary&) = default;
};

nlohmann::json to_json(const DailySummary& s, const Building& b);
std::string summary_digest(const DailySummary& s, const Building& b);

struct MemoryQuery {
    std::optional<int> first_day, last_day;  // inclusive bounds
    std::set<Category> categories;           // empty: any
    std::set<Outcome> outcomes;              // empty: any

    bool matches(const EpisodicRecord& r) const;
};

class SequencingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class NoDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse failure while loading a log; `line` is 1-based.
class LogParseError : public std::runtime_error {
public:
    LogParseError(std::size_t line, const std::string& what)
        : std::runtime_error("memory log line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

nlohmann::json record_to_json(const EpisodicRecord& r, const Building& b);
EpisodicRecord record_from_json(const nlohmann::json& j);

/// Append-only episodic log. With a backing file every record is written
/// and flushed before record() returns.
class MemoryStore {
public:
    explicit MemoryStore(const Building& building) : building_(&building) {}

    /// Opens `path` for appending, loading any records already present.
    static MemoryStore open(const Building& building, const std::filesystem::path& path);
    static MemoryStore load(const Building& building, const std::filesystem::path& path);
    void persist(const std::filesystem::path& path) const;

    /// Throws SequencingError unless rec.id = last id + 1 and (day, tick)
    /// does not go backwards.
    void record(const EpisodicRecord& rec);

    std::uint64_t last_id() const { return records_.empty() ? 0 : records_.back().id; }
    std::size_t size() const { return records_.size(); }
    const std::vector<EpisodicRecord>& records() const { return records_; }
    std::vector<int> days() const;

    /// Throws NoDataError when the day has no records.
    DailySummary summarize_day(int day) const;
    std::vector<EpisodicRecord> retrieve(const MemoryQuery& q) const;

private:
    void append_line(const EpisodicRecord& rec);

    const Building* building_;
    std::vector<EpisodicRecord> records_;
    std::shared_ptr<std::ofstream> sink_;
};

struct TraceEntry {
    int day = 0;
    int goals_version = 0;
    int spec_version = 0;
    std::string summary_digest;
    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

/// One entry per completed day, append-only.
class LongTermTrace {
public:
    /// Throws SequencingError unless e.day = size() + 1.
    void append(TraceEntry e);
    const std::vector<TraceEntry>& entries() const { return entries_; }
    nlohmann::json to_json() const;

private:
    std::vector<TraceEntry> entries_;
};

}  // namespace pepa
