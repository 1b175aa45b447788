#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "pepa/planner.hpp"

namespace pepa {

/// BIO tags of the slot head. Locations and methods are single tokens, so
/// gold sequences never use I-, but the decoder accepts them where valid.
enum class Tag : std::uint8_t { O, B_loc, I_loc, B_method, I_method };
inline constexpr int kTagCount = 5;
std::string_view to_string(Tag t);
std::optional<Tag> parse_tag(std::string_view s);

/// True when every I-x directly follows B-x or I-x.
bool valid_bio(const std::vector<Tag>& tags);

/// Slot-head input: the pending command's words, a "|" separator, then one
/// (location, method) token pair per move candidate.
std::vector<std::string> slot_tokens(const WorldState& s, const Building& b);

struct Example {
    WorldState state;
    Action action;  // teacher label
};

struct Dataset {
    std::vector<Example> examples;
};

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// JSON lines behind a {"schema": "pepa.dataset", "version": 1} header.
void save_dataset(const Dataset& d, const Building& b, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

struct CollectConfig {
    int states = 500;
    std::uint64_t seed = 1;
    int stride = 7;           // ticks between sampled states
    double epsilon = 0.1;     // behaviour policy randomness
    double reset_battery = 0.3;  // share of samples with a redrawn battery level
};

/// Samples states from epsilon-greedy days in the sandbox and labels each
/// with the planner's search result.
Dataset collect_dataset(const SimPlanner& teacher, const SimConfig& sim, const CollectConfig& cfg);

struct TrainConfig {
    int intent_epochs = 12;
    double learning_rate = 0.5;
    double l2 = 1e-5;
    int slot_epochs = 10;
    std::uint64_t seed = 1;
};

struct Prediction {
    Action action;
    ActionKind intent = ActionKind::idle;
    std::vector<std::string> tokens;
    std::vector<Tag> tags;  // empty unless the intent is move_to
    bool fallback = false;  // the heads produced no executable action
};

/// Two-head student: one-vs-rest logistic intent classifier over sparse
/// state features, and an averaged structured perceptron tagging the slot
/// tokens, decoded by Viterbi constrained to exactly one location followed
/// by its method.
class DistilledPolicy {
public:
    static constexpr int kFormatVersion = 1;

    /// Raw prediction; `fallback` is set when the decoded move is not among
    /// the candidate actions, in which case `action` is the rule oracle's
    /// first choice from `oracle`.
    Prediction predict(const WorldState& s, const Building& b, const SimPlanner& oracle) const;

    nlohmann::json to_json() const;
    static DistilledPolicy from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static DistilledPolicy load(const std::filesystem::path& path);

    friend DistilledPolicy train_distilled(const Dataset& d, const SimPlanner& oracle, const TrainConfig& cfg);

    std::size_t intent_features() const { return intent_index_.size(); }

private:
    std::vector<double> intent_scores(const std::vector<std::uint64_t>& feats) const;

    std::unordered_map<std::uint64_t, int> intent_index_;
    std::vector<std::vector<double>> intent_w_;  // [kind][feature]
    std::vector<double> intent_b_;
    std::unordered_map<std::uint64_t, std::array<double, kTagCount>> emit_;
    std::array<std::array<double, kTagCount>, kTagCount + 1> trans_{};  // row kTagCount: start
};

DistilledPolicy train_distilled(const Dataset& d, const SimPlanner& oracle, const TrainConfig& cfg = {});

/// Share of examples on which the student's action equals the label.
double agreement(const DistilledPolicy& p, const Dataset& d, const SimPlanner& oracle);

}  // namespace pepa
