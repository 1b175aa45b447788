#include "pepa/personality.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "pepa/errors.hpp"

namespace pepa {

namespace {

constexpr std::array<std::string_view, 5> kTraitNames{"Low", "Low-Med", "Med", "Med-High", "High"};

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
    return out;
}

}  // namespace

std::string_view to_string(TraitLevel t) { return kTraitNames[static_cast<std::size_t>(t)]; }

std::optional<TraitLevel> parse_trait_level(std::string_view s) {
    for (std::size_t i = 0; i < kTraitNames.size(); ++i)
        if (kTraitNames[i] == s) return static_cast<TraitLevel>(i);
    return std::nullopt;
}

ProfileError::ProfileError(std::vector<std::string> problems)
    : std::runtime_error("invalid personality profile: " + join(problems)), problems_(std::move(problems)) {}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (cur.empty() && std::isspace(static_cast<unsigned char>(c))) continue;
        cur += c;
        const bool end = c == '.' || c == '!' || c == '?';
        if (end && (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (std::any_of(cur.begin(), cur.end(), [](char c) { return !std::isspace(static_cast<unsigned char>(c)); }))
        out.push_back(cur);
    return out;
}

void validate(const PersonalityProfile& p) {
    std::vector<std::string> problems;
    if (p.name.empty()) problems.push_back("name is empty");
    if (const auto n = split_sentences(p.description).size(); n != 3)
        problems.push_back("description has " + std::to_string(n) + " sentences, expected 3");
    auto level_ok = [](TraitLevel t) { return static_cast<std::size_t>(t) < kTraitNames.size(); };
    if (!level_ok(p.trait_anchor.openness)) problems.push_back("openness off the five-level scale");
    if (!level_ok(p.trait_anchor.neuroticism)) problems.push_back("neuroticism off the five-level scale");
    if (!level_ok(p.trait_anchor.conscientiousness)) problems.push_back("conscientiousness off the five-level scale");
    if (!problems.empty()) throw ProfileError(std::move(problems));
}

PersonalityProfile profile_from_json(const nlohmann::json& j) {
    std::vector<std::string> problems;
    PersonalityProfile p;
    auto str = [&](const nlohmann::json& o, const char* key) -> std::string {
        if (!o.contains(key) || !o[key].is_string()) {
            problems.push_back(std::string("missing string field '") + key + "'");
            return {};
        }
        return o[key].get<std::string>();
    };
    if (!j.is_object()) throw ProfileError({"profile is not an object"});
    for (const auto& [k, _] : j.items())
        if (k != "name" && k != "description" && k != "trait_anchor") problems.push_back("unknown field '" + k + "'");
    p.name = str(j, "name");
    p.description = str(j, "description");
    if (!j.contains("trait_anchor") || !j["trait_anchor"].is_object()) {
        problems.push_back("missing object field 'trait_anchor'");
    } else {
        const auto& a = j["trait_anchor"];
        auto level = [&](const char* key, TraitLevel& out) {
            const std::string v = str(a, key);
            if (v.empty()) return;
            if (auto t = parse_trait_level(v)) out = *t;
            else problems.push_back(std::string(key) + " value '" + v + "' is not one of Low, Low-Med, Med, Med-High, High");
        };
        level("openness", p.trait_anchor.openness);
        level("neuroticism", p.trait_anchor.neuroticism);
        level("conscientiousness", p.trait_anchor.conscientiousness);
    }
    try {
        validate(p);
    } catch (const ProfileError& e) {
        for (const auto& s : e.problems())
            if (std::find(problems.begin(), problems.end(), s) == problems.end()) problems.push_back(s);
    }
    if (!problems.empty()) throw ProfileError(std::move(problems));
    return p;
}

nlohmann::json to_json(const PersonalityProfile& p) {
    return {{"name", p.name},
            {"description", p.description},
            {"trait_anchor",
             {{"openness", to_string(p.trait_anchor.openness)},
              {"neuroticism", to_string(p.trait_anchor.neuroticism)},
              {"conscientiousness", to_string(p.trait_anchor.conscientiousness)}}}};
}

std::vector<PersonalityProfile> load_prototypes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("personalities", "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("personalities", path.string() + ": " + e.what());
    }
    if (!j.is_object() || j.value("schema", "") != "pepa.personalities" || !j.contains("prototypes") ||
        !j["prototypes"].is_array())
        throw ConfigError("personalities", path.string() + ": expected schema pepa.personalities with a prototypes array");
    std::vector<PersonalityProfile> out;
    for (std::size_t i = 0; i < j["prototypes"].size(); ++i) {
        try {
            out.push_back(profile_from_json(j["prototypes"][i]));
        } catch (const ProfileError& e) {
            throw ConfigError("prototypes[" + std::to_string(i) + "]", e.what());
        }
    }
    return out;
}

std::vector<PersonalityProfile> load_prototypes() {
    const char* env = std::getenv("PEPA_CONFIG_DIR");
    const std::filesystem::path dir = env ? env : PEPA_CONFIG_DIR;
    return load_prototypes(dir / "personalities.json");
}

const PersonalityProfile& find_profile(const std::vector<PersonalityProfile>& ps, std::string_view name) {
    for (const auto& p : ps)
        if (p.name == name) return p;
    throw ConfigError("personality", "unknown personality '" + std::string(name) + "'");
}

std::string_view to_string(CostClass c) {
    switch (c) {
        case CostClass::minimal: return "minimal";
        case CostClass::low: return "low";
        case CostClass::medium: return "medium";
        case CostClass::high: return "high";
    }
    return "?";
}

void check_bijection(const std::vector<Capability>& entries) {
    std::array<int, kActionKindCount> seen{};
    for (const auto& c : entries) {
        const auto i = static_cast<std::size_t>(c.kind);
        if (i >= kActionKindCount) throw std::invalid_argument("capability with unknown action kind");
        if (++seen[i] > 1) throw std::invalid_argument("capability listed twice: " + std::string(to_string(c.kind)));
    }
    for (std::size_t i = 0; i < kActionKindCount; ++i)
        if (seen[i] == 0)
            throw std::invalid_argument("capability missing: " + std::string(to_string(static_cast<ActionKind>(i))));
}

CapabilityCatalog::CapabilityCatalog(std::vector<Capability> entries) : entries_(std::move(entries)) {
    check_bijection(entries_);
}

CapabilityCatalog CapabilityCatalog::standard() {
    std::vector<Capability> v;
    for (ActionKind k : all_action_kinds()) {
        switch (action_class(k)) {
            case ActionClass::rest:
                v.push_back({k, "none; charges when performed at the charger", CostClass::minimal});
                break;
            case ActionClass::locomotion:
                if (k == ActionKind::sit || k == ActionKind::lie_down || k == ActionKind::stretch)
                    v.push_back({k, "none", CostClass::minimal});
                else
                    v.push_back({k, "motor temperature below the overheat limit", CostClass::high});
                break;
            case ActionClass::expression:
                v.push_back({k, "none", CostClass::medium});
                break;
            case ActionClass::navigation:
                v.push_back({k, "target is a known location other than the current one; elevator for other floors",
                             CostClass::low});
                break;
        }
    }
    return CapabilityCatalog(std::move(v));
}

const Capability& CapabilityCatalog::at(ActionKind k) const {
    for (const auto& c : entries_)
        if (c.kind == k) return c;
    throw std::out_of_range("no capability for action kind");
}

}  // namespace pepa
