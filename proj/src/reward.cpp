#include "pepa/reward.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pepa {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kProvenanceNames = {
    "personality_preference", "goal_incentive", "constraint_penalty", "memory_adjustment"};

constexpr std::array<std::string_view, 4> kEditNames = {"add", "remove", "scale", "set_weight"};

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

template <class T>
T field(const json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string(where) + ": missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(std::string(where) + ": bad type for '" + key + "'");
    }
}

void expect_keys(const json& j, std::initializer_list<std::string_view> keys, const char* where) {
    if (!j.is_object()) throw std::invalid_argument(std::string(where) + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (auto k : keys) known = known || it.key() == k;
        if (!known) throw std::invalid_argument(std::string(where) + ": unexpected field '" + it.key() + "'");
    }
}

}  // namespace

std::string_view to_string(Provenance p) { return kProvenanceNames.at(static_cast<std::size_t>(p)); }

std::optional<Provenance> parse_provenance(std::string_view s) {
    for (std::size_t i = 0; i < kProvenanceNames.size(); ++i)
        if (kProvenanceNames[i] == s) return static_cast<Provenance>(i);
    return std::nullopt;
}

const RewardRule* RewardSpec::find(std::string_view id) const {
    for (const auto& r : rules)
        if (r.id == id) return &r;
    return nullptr;
}

SpecError::SpecError(std::vector<std::string> diagnostics)
    : std::runtime_error("invalid reward spec: " + join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

void validate_spec(const RewardSpec& spec, const Building& building) {
    std::vector<std::string> diags;
    std::set<std::string> seen;
    for (const auto& r : spec.rules) {
        if (r.id.empty()) diags.push_back("rule with empty id");
        else if (!seen.insert(r.id).second) diags.push_back("duplicate rule id '" + r.id + "'");
        if (!std::isfinite(r.weight)) diags.push_back("rule '" + r.id + "': weight is not finite");
        try {
            Condition::compile(r.condition, building);
        } catch (const ConditionParseError& e) {
            diags.push_back("rule '" + r.id + "': " + e.what());
        }
    }
    if (!diags.empty()) throw SpecError(std::move(diags));
}

CompiledSpec::CompiledSpec(const RewardSpec& spec, const Building& building) : spec_(spec) {
    validate_spec(spec, building);
    conditions_.reserve(spec.rules.size());
    for (const auto& r : spec.rules) conditions_.push_back(Condition::compile(r.condition, building));
}

double CompiledSpec::evaluate(const Facts& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < conditions_.size(); ++i)
        if (conditions_[i].eval(f)) sum += spec_.rules[i].weight;
    return sum;
}

bool CompiledSpec::references(Field f) const {
    return std::any_of(conditions_.begin(), conditions_.end(), [f](const Condition& c) { return c.references(f); });
}

void CompiledSpec::prepare(const Facts& state, Prepared& out) const {
    out.constant = 0.0;
    out.live.clear();
    for (std::size_t i = 0; i < conditions_.size(); ++i) {
        if (!conditions_[i].eval_state(state)) continue;
        if (conditions_[i].state_only()) out.constant += spec_.rules[i].weight;
        else out.live.push_back(static_cast<std::uint16_t>(i));
    }
}

double CompiledSpec::evaluate(const Facts& f, const Prepared& p) const {
    double sum = p.constant;
    for (auto i : p.live)
        if (conditions_[i].eval_action(f)) sum += spec_.rules[i].weight;
    return sum;
}

std::vector<std::string> CompiledSpec::matching(const Facts& f) const {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < conditions_.size(); ++i)
        if (conditions_[i].eval(f)) ids.push_back(spec_.rules[i].id);
    return ids;
}

double evaluate_intrinsic(const CompiledSpec& spec, const WorldState& s, const Action& a, const Building& b) {
    return spec.evaluate(make_facts(s, a, b));
}

double total_reward(double intrinsic, double extrinsic) {
    if (!std::isfinite(intrinsic) || !std::isfinite(extrinsic))
        throw NumericError("total_reward: non-finite reward component");
    return intrinsic + extrinsic;
}

RewardSpec apply_patch(const RewardSpec& spec, const RewardPatch& patch) {
    if (patch.base_version != spec.version)
        throw StalePatchError("patch base_version " + std::to_string(patch.base_version) + " does not match spec version " +
                              std::to_string(spec.version));
    RewardSpec out = spec;
    out.version = spec.version + 1;
    auto locate = [&](const std::string& id) -> std::vector<RewardRule>::iterator {
        for (auto it = out.rules.begin(); it != out.rules.end(); ++it)
            if (it->id == id) return it;
        throw PatchError("patch references unknown rule id '" + id + "'");
    };
    for (const auto& e : patch.edits) {
        switch (e.op) {
            case RewardEdit::Op::add:
                if (out.find(e.rule.id)) throw PatchError("patch adds duplicate rule id '" + e.rule.id + "'");
                if (!std::isfinite(e.rule.weight)) throw PatchError("patch adds rule '" + e.rule.id + "' with non-finite weight");
                out.rules.push_back(e.rule);
                break;
            case RewardEdit::Op::remove:
                out.rules.erase(locate(e.id));
                break;
            case RewardEdit::Op::scale: {
                auto it = locate(e.id);
                const double w = it->weight * e.value;
                if (!std::isfinite(w)) throw PatchError("scaling rule '" + e.id + "' gives a non-finite weight");
                it->weight = w;
                break;
            }
            case RewardEdit::Op::set_weight:
                if (!std::isfinite(e.value)) throw PatchError("non-finite weight for rule '" + e.id + "'");
                locate(e.id)->weight = e.value;
                break;
        }
    }
    return out;
}

double battery_conservation_mass(const RewardSpec& spec, const Building& building) {
    double mass = 0.0;
    for (const auto& r : spec.rules)
        if (Condition::compile(r.condition, building).references(Field::battery)) mass += std::abs(r.weight);
    return mass;
}

json to_json(const RewardRule& r) {
    return json{{"id", r.id}, {"condition", r.condition}, {"weight", r.weight}, {"provenance", to_string(r.provenance)}};
}

json to_json(const RewardSpec& spec) {
    json rules = json::array();
    for (const auto& r : spec.rules) rules.push_back(to_json(r));
    return json{{"version", spec.version}, {"rules", rules}};
}

json to_json(const RewardPatch& patch) {
    json edits = json::array();
    for (const auto& e : patch.edits) {
        json j{{"op", kEditNames[static_cast<std::size_t>(e.op)]}};
        switch (e.op) {
            case RewardEdit::Op::add: j["rule"] = to_json(e.rule); break;
            case RewardEdit::Op::remove: j["id"] = e.id; break;
            case RewardEdit::Op::scale: j["id"] = e.id; j["factor"] = e.value; break;
            case RewardEdit::Op::set_weight: j["id"] = e.id; j["weight"] = e.value; break;
        }
        edits.push_back(std::move(j));
    }
    return json{{"base_version", patch.base_version}, {"edits", edits}};
}

RewardRule rule_from_json(const json& j) {
    expect_keys(j, {"id", "condition", "weight", "provenance"}, "rule");
    RewardRule r;
    r.id = field<std::string>(j, "id", "rule");
    r.condition = field<std::string>(j, "condition", "rule");
    if (!j.contains("weight") || !j["weight"].is_number()) throw std::invalid_argument("rule: 'weight' must be a number");
    r.weight = j["weight"].get<double>();
    const auto p = parse_provenance(field<std::string>(j, "provenance", "rule"));
    if (!p) throw std::invalid_argument("rule: unknown provenance '" + j["provenance"].get<std::string>() + "'");
    r.provenance = *p;
    return r;
}

RewardSpec spec_from_json(const json& j) {
    expect_keys(j, {"version", "rules"}, "spec");
    RewardSpec s;
    s.version = field<int>(j, "version", "spec");
    if (!j.contains("rules") || !j["rules"].is_array()) throw std::invalid_argument("spec: 'rules' must be an array");
    for (const auto& r : j["rules"]) s.rules.push_back(rule_from_json(r));
    return s;
}

RewardPatch patch_from_json(const json& j) {
    expect_keys(j, {"base_version", "edits"}, "patch");
    RewardPatch p;
    p.base_version = field<int>(j, "base_version", "patch");
    if (!j.contains("edits") || !j["edits"].is_array()) throw std::invalid_argument("patch: 'edits' must be an array");
    for (const auto& ej : j["edits"]) {
        const auto op = field<std::string>(ej, "op", "edit");
        RewardEdit e;
        auto number = [&](const char* key) {
            if (!ej.contains(key) || !ej[key].is_number())
                throw std::invalid_argument(std::string("edit: '") + key + "' must be a number");
            return ej[key].get<double>();
        };
        if (op == "add") {
            expect_keys(ej, {"op", "rule"}, "edit");
            e = RewardEdit::add(rule_from_json(ej.at("rule")));
        } else if (op == "remove") {
            expect_keys(ej, {"op", "id"}, "edit");
            e = RewardEdit::remove(field<std::string>(ej, "id", "edit"));
        } else if (op == "scale") {
            expect_keys(ej, {"op", "id", "factor"}, "edit");
            e = RewardEdit::scale(field<std::string>(ej, "id", "edit"), number("factor"));
        } else if (op == "set_weight") {
            expect_keys(ej, {"op", "id", "weight"}, "edit");
            e = RewardEdit::set_weight(field<std::string>(ej, "id", "edit"), number("weight"));
        } else {
            throw std::invalid_argument("edit: unknown op '" + op + "'");
        }
        p.edits.push_back(std::move(e));
    }
    return p;
}

std::string canonical(const RewardSpec& spec) { return to_json(spec).dump(); }

}  // namespace pepa
