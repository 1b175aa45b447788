#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pepa/action.hpp"

namespace pepa {

enum class TraitLevel : std::uint8_t { Low, LowMed, Med, MedHigh, High };

std::string_view to_string(TraitLevel t);
std::optional<TraitLevel> parse_trait_level(std::string_view s);

struct TraitAnchor {
    TraitLevel openness = TraitLevel::Med;
    TraitLevel neuroticism = TraitLevel::Med;
    TraitLevel conscientiousness = TraitLevel::Med;
    friend bool operator==(const TraitAnchor&, const TraitAnchor&) = default;
};

/// Name, a three-sentence description, and trait anchors. The anchors are
/// analysis metadata; goal generation and reflection read only the text.
struct PersonalityProfile {
    std::string name;
    std::string description;
    TraitAnchor trait_anchor;
};

/// One message per violated invariant.
class ProfileError : public std::runtime_error {
public:
    explicit ProfileError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Sentences end in '.', '!' or '?' followed by whitespace or end of text.
std::vector<std::string> split_sentences(std::string_view text);

/// Throws ProfileError listing every violation.
void validate(const PersonalityProfile& p);

PersonalityProfile profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PersonalityProfile& p);

/// Reads the prototype file; ConfigError on a missing or malformed file or
/// an invalid profile.
std::vector<PersonalityProfile> load_prototypes(const std::filesystem::path& path);

/// The shipped prototypes (config/personalities.json in the source tree).
std::vector<PersonalityProfile> load_prototypes();
const PersonalityProfile& find_profile(const std::vector<PersonalityProfile>& ps, std::string_view name);

enum class CostClass : std::uint8_t { minimal, low, medium, high };
std::string_view to_string(CostClass c);

struct Capability {
    ActionKind kind;
    std::string preconditions;
    CostClass cost;
};

/// Available actions with their preconditions and cost.
class CapabilityCatalog {
public:
    explicit CapabilityCatalog(std::vector<Capability> entries);
    static CapabilityCatalog standard();

    const std::vector<Capability>& entries() const { return entries_; }
    const Capability& at(ActionKind k) const;

private:
    std::vector<Capability> entries_;
};

/// Throws std::invalid_argument unless every action kind appears exactly once.
void check_bijection(const std::vector<Capability>& entries);

}  // namespace pepa
