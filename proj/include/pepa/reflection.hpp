#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pepa/building.hpp"
#include "pepa/memory.hpp"
#include "pepa/personality.hpp"
#include "pepa/reward.hpp"

namespace pepa {

struct DailyGoal {
    std::string id;
    std::string text;
    std::optional<std::string> machine_hint;  // condition in the reward language
    friend bool operator==(const DailyGoal&, const DailyGoal&) = default;
};

struct GoalSet {
    int version = 0;
    std::string ultimate_goal;
    std::vector<DailyGoal> daily_goals;
    int effective_day = 1;
    friend bool operator==(const GoalSet&, const GoalSet&) = default;
};

nlohmann::json to_json(const GoalSet& g);
GoalSet goals_from_json(const nlohmann::json& j);

struct ReflectionInput {
    const PersonalityProfile* personality = nullptr;
    const CapabilityCatalog* capabilities = nullptr;
    const Building* building = nullptr;
    DailySummary summary;
    GoalSet current_goals;
    RewardSpec current_spec;
};

struct ReflectionOutput {
    GoalSet next_goals;
    RewardPatch patch;
    std::string rationale;
    friend bool operator==(const ReflectionOutput&, const ReflectionOutput&) = default;
};

nlohmann::json to_json(const ReflectionOutput& o);

enum class Provider : std::uint8_t { cloud, edge, fixture };
std::string_view to_string(Provider p);
std::optional<Provider> parse_provider(std::string_view s);

struct ChatExchange {
    std::string prompt;
    std::string response;
    double latency = 0.0;  // seconds
    Provider provider = Provider::fixture;
};

class ReflectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The response does not follow the output schema. `field` is a JSON path.
class ReflectionSchemaError : public ReflectionError {
public:
    ReflectionSchemaError(std::string field, const std::string& why, std::string raw)
        : ReflectionError("reflection output [" + field + "]: " + why), field_(std::move(field)), raw_(std::move(raw)) {}
    const std::string& field() const noexcept { return field_; }
    const std::string& raw() const noexcept { return raw_; }

private:
    std::string field_;
    std::string raw_;
};

/// A patch edit names a rule that does not exist at that point.
class ReflectionReferenceError : public ReflectionError {
public:
    ReflectionReferenceError(std::string id, std::string raw)
        : ReflectionError("reflection patch references unknown rule '" + id + "'"), id_(std::move(id)), raw_(std::move(raw)) {}
    const std::string& id() const noexcept { return id_; }
    const std::string& raw() const noexcept { return raw_; }

private:
    std::string id_;
    std::string raw_;
};

class FixtureMissError : public std::runtime_error {
public:
    explicit FixtureMissError(std::string digest)
        : std::runtime_error("no recorded response for prompt " + digest), digest_(std::move(digest)) {}
    const std::string& digest() const noexcept { return digest_; }

private:
    std::string digest_;
};

class ChatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Day-1 goal hierarchy and spec v0, derived from keyword cues in the
/// personality description (trait anchors are not read).
std::pair<GoalSet, RewardSpec> generate_initial_goals(const PersonalityProfile& p, const CapabilityCatalog& c);

std::string build_reflection_prompt(const ReflectionInput& in);

/// Strict parse of the structured output. Edits are checked against
/// `current` in order, so an edit may refer to a rule added earlier.
ReflectionOutput parse_reflection_response(const std::string& text, const RewardSpec& current);

/// Throws ReflectionError unless `out` chains onto `in`.
void check_output(const ReflectionInput& in, const ReflectionOutput& out);

struct ReflectionResult {
    ReflectionOutput output;
    ChatExchange exchange;
};

class Reflector {
public:
    virtual ~Reflector() = default;
    virtual ReflectionResult reflect(const ReflectionInput& in) = 0;
};

/// Deterministic table of summary patterns to edits:
///  - battery depletion: add a red line at 35% with charger seeking, docking
///    and low-battery bans, or raise an existing one by 5 points with a
///    heavier penalty; rest preference x1.5
///  - near miss (minimum battery within 5 points of the red line): raise the
///    red line by 5 points; rest preference x1.5
///  - two or more navigation failures: rest in place after failures
///  - otherwise, for profiles with exploration cues: exploration x1.1
/// With `truncated`, every edit that introduces or moves a battery
/// threshold is dropped (the weak-model stand-in).
class RuleReflector : public Reflector {
public:
    explicit RuleReflector(bool truncated = false, double latency = 25.64)
        : truncated_(truncated), latency_(latency) {}
    ReflectionResult reflect(const ReflectionInput& in) override;
    ReflectionOutput decide(const ReflectionInput& in) const;

private:
    bool truncated_;
    double latency_;
};

class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual ChatExchange chat(const std::string& prompt) = 0;
};

/// Sends the prompt through a chat client and parses the reply.
class LlmReflector : public Reflector {
public:
    explicit LlmReflector(std::shared_ptr<ChatClient> client) : client_(std::move(client)) {}
    ReflectionResult reflect(const ReflectionInput& in) override;

private:
    std::shared_ptr<ChatClient> client_;
};

/// Directory of recorded exchanges, one JSON file per prompt digest.
class FixtureStore {
public:
    explicit FixtureStore(std::filesystem::path dir);
    static std::string key(const std::string& prompt);
    std::optional<ChatExchange> find(const std::string& prompt) const;
    void put(const ChatExchange& ex);
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::mutex mu_;
};

/// Replays recorded responses; a miss is an error, never a fallback.
class FixtureChatClient : public ChatClient {
public:
    explicit FixtureChatClient(std::shared_ptr<FixtureStore> store) : store_(std::move(store)) {}
    ChatExchange chat(const std::string& prompt) override;

private:
    std::shared_ptr<FixtureStore> store_;
};

/// Forwards to `inner` and stores every exchange.
class RecordingChatClient : public ChatClient {
public:
    RecordingChatClient(std::shared_ptr<ChatClient> inner, std::shared_ptr<FixtureStore> store)
        : inner_(std::move(inner)), store_(std::move(store)) {}
    ChatExchange chat(const std::string& prompt) override;

private:
    std::shared_ptr<ChatClient> inner_;
    std::shared_ptr<FixtureStore> store_;
};

/// Wraps a reflector and records its exchanges into a fixture store.
class RecordingReflector : public Reflector {
public:
    RecordingReflector(std::shared_ptr<Reflector> inner, std::shared_ptr<FixtureStore> store)
        : inner_(std::move(inner)), store_(std::move(store)) {}
    ReflectionResult reflect(const ReflectionInput& in) override;

private:
    std::shared_ptr<Reflector> inner_;
    std::shared_ptr<FixtureStore> store_;
};

struct HttpChatConfig {
    std::string endpoint;  // e.g. http://host:port/v1/chat/completions
    std::string api_key;
    std::string model;
    int retries = 2;
    double timeout_s = 120.0;
    Provider provider = Provider::cloud;

    /// PEPA_CHAT_ENDPOINT, PEPA_CHAT_API_KEY, PEPA_CHAT_MODEL. ConfigError
    /// when the endpoint is unset.
    static HttpChatConfig from_env();
};

/// Chat-completion style POST: {"model", "messages": [{"role": "user",
/// "content": prompt}]}; reads choices[0].message.content.
class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(HttpChatConfig cfg);
    ChatExchange chat(const std::string& prompt) override;

private:
    HttpChatConfig cfg_;
};

}  // namespace pepa
