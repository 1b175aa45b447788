#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pepa/condition.hpp"

namespace pepa {

enum class Provenance : std::uint8_t {
    personality_preference,
    goal_incentive,
    constraint_penalty,
    memory_adjustment,
};
std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view s);

struct RewardRule {
    std::string id;
    std::string condition;
    double weight = 0.0;
    Provenance provenance = Provenance::personality_preference;
    friend bool operator==(const RewardRule&, const RewardRule&) = default;
};

struct RewardSpec {
    int version = 0;
    std::vector<RewardRule> rules;

    const RewardRule* find(std::string_view id) const;
    friend bool operator==(const RewardSpec&, const RewardSpec&) = default;
};

struct RewardEdit {
    enum class Op : std::uint8_t { add, remove, scale, set_weight };
    Op op = Op::add;
    RewardRule rule;     // add
    std::string id;      // remove, scale, set_weight
    double value = 0.0;  // scale factor or new weight

    static RewardEdit add(RewardRule r) { return {Op::add, std::move(r), {}, 0.0}; }
    static RewardEdit remove(std::string id) { return {Op::remove, {}, std::move(id), 0.0}; }
    static RewardEdit scale(std::string id, double f) { return {Op::scale, {}, std::move(id), f}; }
    static RewardEdit set_weight(std::string id, double w) { return {Op::set_weight, {}, std::move(id), w}; }
    friend bool operator==(const RewardEdit&, const RewardEdit&) = default;
};

struct RewardPatch {
    int base_version = 0;
    std::vector<RewardEdit> edits;
    friend bool operator==(const RewardPatch&, const RewardPatch&) = default;
};

/// Invalid spec. Carries one diagnostic per offending rule.
class SpecError : public std::runtime_error {
public:
    explicit SpecError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

class StalePatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Throws SpecError listing every duplicate id, non-finite weight and
/// condition that fails to compile against `building`.
void validate_spec(const RewardSpec& spec, const Building& building);

/// A validated spec with its conditions compiled.
class CompiledSpec {
public:
    CompiledSpec() = default;
    CompiledSpec(const RewardSpec& spec, const Building& building);

    double evaluate(const Facts& f) const;

    /// Rules whose state part holds for one state, for scoring many actions
    /// from that state. evaluate(f, prepare(f)) equals evaluate(f).
    struct Prepared {
        double constant = 0.0;
        std::vector<std::uint16_t> live;
    };
    void prepare(const Facts& state, Prepared& out) const;
    double evaluate(const Facts& f, const Prepared& p) const;

    /// Ids of the rules whose condition holds, in spec order.
    std::vector<std::string> matching(const Facts& f) const;

    const RewardSpec& spec() const { return spec_; }
    bool references(Field f) const;

private:
    RewardSpec spec_;
    std::vector<Condition> conditions_;
};

/// Sum of the weights of all rules whose condition holds.
double evaluate_intrinsic(const CompiledSpec& spec, const WorldState& s, const Action& a, const Building& b);

/// intrinsic + extrinsic; throws NumericError on non-finite input.
double total_reward(double intrinsic, double extrinsic);

/// New spec at version + 1 with the edits applied in order. Throws
/// StalePatchError on a base-version mismatch and PatchError on an unknown
/// rule id, a duplicate add or a non-finite value.
RewardSpec apply_patch(const RewardSpec& spec, const RewardPatch& patch);

/// Sum of |weight| over rules conditioned on battery level.
double battery_conservation_mass(const RewardSpec& spec, const Building& building);

nlohmann::json to_json(const RewardSpec& spec);
nlohmann::json to_json(const RewardPatch& patch);
nlohmann::json to_json(const RewardRule& rule);
RewardSpec spec_from_json(const nlohmann::json& j);
RewardPatch patch_from_json(const nlohmann::json& j);
RewardRule rule_from_json(const nlohmann::json& j);

/// Sorted-key compact serialization used for replay comparisons.
std::string canonical(const RewardSpec& spec);

}  // namespace pepa
