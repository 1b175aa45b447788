#include "pepa/distill.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "pepa/digest.hpp"

namespace pepa {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kTagCount> kTagNames{"O", "B-loc", "I-loc", "B-method", "I-method"};

std::uint64_t h(std::string_view s) { return fnv1a64(s); }

std::string bin(double v, double width) { return std::to_string(static_cast<int>(std::floor(v / width))); }

std::string action_key(const Action& a, const Building& b) {
    if (!a.is_move()) return std::string(to_string(a.kind));
    return b.node(a.target).name + "/" + std::string(to_string(a.method));
}

struct Context {
    std::vector<Candidate<Action>> priors;
    std::vector<Action> moves;  // slot options, candidate order
    std::vector<std::string> tokens;
    std::size_t sep = 0;  // index of "|"
};

Context context(const WorldState& s, const Building& b, const SimPlanner& oracle) {
    Context c;
    c.priors = oracle.priors(s);
    for (const auto& a : candidate_actions(s, b))
        if (a.is_move()) c.moves.push_back(a);
    c.tokens = slot_tokens(s, b);
    c.sep = static_cast<std::size_t>(std::find(c.tokens.begin(), c.tokens.end(), "|") - c.tokens.begin());
    return c;
}

std::vector<std::uint64_t> intent_features(const WorldState& s, const Building& b, const Context& c) {
    std::vector<std::string> base;
    const std::string bat5 = "b5=" + bin(s.battery(), 5), bat10 = "b10=" + bin(s.battery(), 10);
    const std::string temp = "t=" + bin(s.motor_temp - 25.0, 5);
    const std::string hour = "h=" + bin(s.clock, 60);
    const UserEvent* cmd = s.pending_command();
    const std::string cmdf = "cmd=" + (cmd ? std::string(to_string(cmd->category)) : std::string("none"));
    const std::string place = s.location == b.home() ? "at=home" : s.location == b.charger() ? "at=charger" : "at=away";
    const std::string top1 = "top1=" + (c.priors.empty() ? std::string("-") : action_key(c.priors[0].action, b));
    const std::string top1c =
        "top1c=" + (c.priors.empty() ? std::string("-") : std::string(to_string(action_category(c.priors[0].action, b))));
    const std::string top2 = "top2=" + (c.priors.size() < 2 ? std::string("-") : action_key(c.priors[1].action, b));
    const std::string fails = "f=" + std::to_string(std::min(s.recent_failures(), 3));
    base = {"bias", bat5, bat10, temp, hour, cmdf, place, top1, top1c, top2, fails,
            "loc=" + b.node(s.location).name, "floor=" + std::to_string(s.floor), "mood=" + bin(s.mood, 0.2),
            std::string("charging=") + (s.charging ? "1" : "0")};
    if (cmd && cmd->target == s.location) base.push_back("cmd_here");
    // one-degree bins near the thermal limits, where the teacher's choice flips
    const std::string fine = s.motor_temp >= 50.0 ? "tt=" + bin(s.motor_temp, 1) : std::string("tt=cool");
    base.push_back(fine);
    base.push_back(fine + "&" + top1);
    base.push_back(fine + "&" + place);
    base.push_back(fine + "&" + cmdf);
    base.push_back(fine + "&" + top2);
    const std::vector<std::pair<std::string, std::string>> pairs{
        {bat5, place}, {bat5, cmdf},  {temp, cmdf},  {temp, top1}, {bat5, top1}, {hour, bat10},
        {cmdf, place}, {top1, top2},  {top1, cmdf},  {top1, place}, {temp, place}, {fails, top1},
        {top1c, bat5}, {top1c, temp}, {hour, place}, {hour, top1}};
    std::vector<std::uint64_t> out;
    for (const auto& f : base) out.push_back(h(f));
    for (const auto& [x, y] : pairs) out.push_back(h(x + "&" + y));
    return out;
}

/// Features of each slot token; the tag is conjoined at scoring time.
std::vector<std::vector<std::uint64_t>> token_features(const WorldState& s, const Building& b, const Context& c) {
    const UserEvent* cmd = s.pending_command();
    const std::string bat5 = "b5=" + bin(s.battery(), 5);
    const std::string cmdf = "cmd=" + (cmd ? std::string(to_string(cmd->category)) : std::string("none"));
    const std::string place = s.location == b.home() ? "at=home" : s.location == b.charger() ? "at=charger" : "at=away";
    const std::string late = s.clock >= 1200 ? "late" : "day";
    const std::string temp = "t=" + bin(s.motor_temp - 25.0, 5);
    // rank of each move among the oracle's candidates
    auto move_rank = [&](const Action& a) {
        for (std::size_t i = 0; i < c.priors.size(); ++i)
            if (c.priors[i].action == a) return std::to_string(i);
        return std::string("none");
    };
    std::vector<std::vector<std::uint64_t>> out(c.tokens.size());
    for (std::size_t i = 0; i < c.tokens.size(); ++i) {
        auto& f = out[i];
        if (i <= c.sep) {
            f.push_back(h(i == c.sep ? "role=sep" : "role=cmd"));
            continue;
        }
        const std::size_t pair = (i - c.sep - 1) / 2;
        const Action& mv = c.moves.at(pair);
        const bool is_loc = (i - c.sep - 1) % 2 == 0;
        const std::string rank = "rank=" + move_rank(mv);
        const std::string kind = "kind=" + std::string(to_string(b.node(mv.target).kind));
        const bool target = cmd && cmd->target == mv.target;
        const bool mentioned =
            std::find(c.tokens.begin(), c.tokens.begin() + static_cast<long>(c.sep), b.node(mv.target).name) !=
            c.tokens.begin() + static_cast<long>(c.sep);
        if (is_loc) {
            std::vector<std::string> xs{"role=loc", rank, kind, "tok=" + c.tokens[i], target ? "cmd_target" : "not_target",
                                        mentioned ? "mentioned" : "unmentioned", "opt=" + std::to_string(pair)};
            for (const std::string& x : xs) f.push_back(h(x));
            for (const std::string& ctx : {bat5, cmdf, place, late, temp}) {
                f.push_back(h(ctx + "&" + kind));
                f.push_back(h(ctx + "&" + rank));
                f.push_back(h(ctx + "&" + (target ? "cmd_target" : "not_target")));
            }
        } else {
            const bool same = b.floor_of(mv.target) == s.floor;
            const std::string m = "m=" + c.tokens[i];
            const bool said = std::find(c.tokens.begin(), c.tokens.begin() + static_cast<long>(c.sep), c.tokens[i]) !=
                              c.tokens.begin() + static_cast<long>(c.sep);
            for (const std::string& x : {std::string("role=method"), m, m + (same ? "&same_floor" : "&other_floor"),
                                         m + (said ? "&said" : "&unsaid"), m + "&" + rank})
                f.push_back(h(x));
        }
    }
    return out;
}

bool tag_allowed(Tag t, std::size_t i, const Context& c) {
    if (t == Tag::O) return true;
    if (i <= c.sep) return false;
    const bool is_loc = (i - c.sep - 1) % 2 == 0;
    return (t == Tag::B_loc || t == Tag::I_loc) ? is_loc : !is_loc;
}

// Automaton over tags: 0 before the slot, 1 inside the location, 2 inside
// the method, 3 after. Returns the next state or -1.
int advance(int state, Tag t) {
    switch (state) {
        case 0: return t == Tag::O ? 0 : t == Tag::B_loc ? 1 : -1;
        case 1: return t == Tag::I_loc ? 1 : t == Tag::B_method ? 2 : -1;
        case 2: return t == Tag::I_method ? 2 : t == Tag::O ? 3 : -1;
        case 3: return t == Tag::O ? 3 : -1;
    }
    return -1;
}

std::vector<Tag> gold_tags(const Context& c, const Action& a) {
    std::vector<Tag> tags(c.tokens.size(), Tag::O);
    for (std::size_t p = 0; p < c.moves.size(); ++p)
        if (c.moves[p] == a) {
            tags[c.sep + 1 + 2 * p] = Tag::B_loc;
            tags[c.sep + 2 + 2 * p] = Tag::B_method;
        }
    return tags;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::string_view to_string(Tag t) { return kTagNames[static_cast<std::size_t>(t)]; }

std::optional<Tag> parse_tag(std::string_view s) {
    for (std::size_t i = 0; i < kTagNames.size(); ++i)
        if (kTagNames[i] == s) return static_cast<Tag>(i);
    return std::nullopt;
}

bool valid_bio(const std::vector<Tag>& tags) {
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const Tag prev = i == 0 ? Tag::O : tags[i - 1];
        if (tags[i] == Tag::I_loc && prev != Tag::B_loc && prev != Tag::I_loc) return false;
        if (tags[i] == Tag::I_method && prev != Tag::B_method && prev != Tag::I_method) return false;
    }
    return true;
}

std::vector<std::string> slot_tokens(const WorldState& s, const Building& b) {
    std::vector<std::string> out;
    if (const UserEvent* cmd = s.pending_command()) {
        std::string word;
        for (char ch : cmd->text + " ") {
            if (ch == ' ') {
                if (!word.empty()) out.push_back(std::move(word));
                word.clear();
            } else if (ch != ',' && ch != '.' && ch != '!' && ch != '?') {
                word += ch;
            }
        }
    }
    out.push_back("|");
    for (const auto& a : candidate_actions(s, b))
        if (a.is_move()) {
            out.push_back(b.node(a.target).name);
            out.push_back(std::string(to_string(a.method)));
        }
    return out;
}

// ---------------------------------------------------------------- dataset

void save_dataset(const Dataset& d, const Building& b, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DatasetError("cannot write " + path.string());
    out << json{{"schema", "pepa.dataset"}, {"version", 1}}.dump() << "\n";
    for (const auto& e : d.examples) {
        out << json{{"state", state_to_json(e.state)}, {"action", action_to_json(e.action, b)}}.dump() << "\n";
    }
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DatasetError(path.string() + ": empty file");
    try {
        const json head = json::parse(line);
        if (head.value("schema", "") != "pepa.dataset" || head.value("version", 0) != 1)
            throw DatasetError(path.string() + ": unsupported header " + line);
    } catch (const json::exception& e) {
        throw DatasetError(path.string() + ": bad header: " + e.what());
    }
    Dataset d;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            d.examples.push_back({state_from_json(j.at("state")), action_from_json(j.at("action"))});
        } catch (const std::exception& e) {
            throw DatasetError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return d;
}

Dataset collect_dataset(const SimPlanner& teacher, const SimConfig& sim, const CollectConfig& cfg) {
    World world(sim);
    Rng rng(mix_seed(cfg.seed, 0xC011EC7));
    Dataset d;
    std::uint64_t episode = 0;
    while (static_cast<int>(d.examples.size()) < cfg.states) {
        WorldState s = world.reset(mix_seed(cfg.seed, episode++));
        int next_sample = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.stride)));
        while (!is_terminal(s) && static_cast<int>(d.examples.size()) < cfg.states) {
            if (!s.travel && s.clock >= next_sample) {
                WorldState probe = s;
                if (rng.bernoulli(cfg.reset_battery)) {
                    probe.battery_units = to_battery_units(1.0 + std::floor(rng.uniform() * 990.0) / 10.0);
                    probe.charging = false;
                }
                const Action label = teacher.plan(probe, mix_seed(cfg.seed, 0x1abe1000 + d.examples.size())).action;
                d.examples.push_back({probe, label});
                next_sample = s.clock + cfg.stride;
            }
            Action a;
            if (s.travel) {
                a = s.travel->action;
            } else {
                const auto pri = teacher.priors(s);
                a = rng.bernoulli(cfg.epsilon) ? pri[rng.below(pri.size())].action : pri.front().action;
            }
            s = world.step(s, a).post_state;
        }
    }
    return d;
}

// ---------------------------------------------------------------- policy

std::vector<double> DistilledPolicy::intent_scores(const std::vector<std::uint64_t>& feats) const {
    std::vector<double> z = intent_b_;
    for (auto f : feats) {
        const auto it = intent_index_.find(f);
        if (it == intent_index_.end()) continue;
        for (std::size_t k = 0; k < z.size(); ++k) z[k] += intent_w_[k][static_cast<std::size_t>(it->second)];
    }
    return z;
}

namespace {

double emission(const std::unordered_map<std::uint64_t, std::array<double, kTagCount>>& emit,
                const std::vector<std::uint64_t>& feats, Tag t) {
    double s = 0.0;
    for (auto f : feats)
        if (auto it = emit.find(f); it != emit.end()) s += it->second[static_cast<std::size_t>(t)];
    return s;
}

std::vector<Tag> viterbi(const std::unordered_map<std::uint64_t, std::array<double, kTagCount>>& emit,
                         const std::array<std::array<double, kTagCount>, kTagCount + 1>& trans,
                         const std::vector<std::vector<std::uint64_t>>& tf, const Context& c) {
    const std::size_t n = tf.size();
    constexpr int S = 4;
    // score[i][state][tag]: best score ending at token i with `tag`, in automaton `state`
    std::vector<std::array<std::array<double, kTagCount>, S>> score(
        n, std::array<std::array<double, kTagCount>, S>{});
    std::vector<std::array<std::array<std::pair<int, int>, kTagCount>, S>> back(n);
    for (auto& a : score)
        for (auto& r : a) r.fill(-INFINITY);
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, kTagCount> e{};
        for (int t = 0; t < kTagCount; ++t)
            e[static_cast<std::size_t>(t)] = tag_allowed(static_cast<Tag>(t), i, c)
                                                 ? emission(emit, tf[i], static_cast<Tag>(t))
                                                 : -INFINITY;
        for (int t = 0; t < kTagCount; ++t) {
            const auto ti = static_cast<std::size_t>(t);
            if (e[ti] == -INFINITY) continue;
            if (i == 0) {
                const int ns = advance(0, static_cast<Tag>(t));
                if (ns >= 0) score[0][static_cast<std::size_t>(ns)][ti] = trans[kTagCount][ti] + e[ti];
                continue;
            }
            for (int st = 0; st < S; ++st) {
                const int ns = advance(st, static_cast<Tag>(t));
                if (ns < 0) continue;
                for (int pt = 0; pt < kTagCount; ++pt) {
                    const double prev = score[i - 1][static_cast<std::size_t>(st)][static_cast<std::size_t>(pt)];
                    if (prev == -INFINITY) continue;
                    const double v = prev + trans[static_cast<std::size_t>(pt)][ti] + e[ti];
                    auto& slot = score[i][static_cast<std::size_t>(ns)][ti];
                    if (v > slot) {
                        slot = v;
                        back[i][static_cast<std::size_t>(ns)][ti] = {st, pt};
                    }
                }
            }
        }
    }
    double best = -INFINITY;
    int bs = -1, bt = -1;
    for (int st : {2, 3})
        for (int t = 0; t < kTagCount; ++t)
            if (score[n - 1][static_cast<std::size_t>(st)][static_cast<std::size_t>(t)] > best) {
                best = score[n - 1][static_cast<std::size_t>(st)][static_cast<std::size_t>(t)];
                bs = st;
                bt = t;
            }
    if (bs < 0) return {};  // no complete slot fits (no move options)
    std::vector<Tag> tags(n);
    for (std::size_t i = n; i-- > 0;) {
        tags[i] = static_cast<Tag>(bt);
        if (i == 0) break;
        const auto [ps, pt] = back[i][static_cast<std::size_t>(bs)][static_cast<std::size_t>(bt)];
        bs = ps;
        bt = pt;
    }
    return tags;
}

std::optional<Action> action_from_tags(const Context& c, const std::vector<Tag>& tags) {
    for (std::size_t i = c.sep + 1; i < tags.size(); ++i)
        if (tags[i] == Tag::B_loc) {
            const std::size_t pair = (i - c.sep - 1) / 2;
            if (i + 1 < tags.size() && tags[i + 1] == Tag::B_method) return c.moves.at(pair);
        }
    return std::nullopt;
}

}  // namespace

Prediction DistilledPolicy::predict(const WorldState& s, const Building& b, const SimPlanner& oracle) const {
    const Context c = context(s, b, oracle);
    Prediction p;
    p.tokens = c.tokens;
    const auto z = intent_scores(pepa::intent_features(s, b, c));
    p.intent = static_cast<ActionKind>(std::max_element(z.begin(), z.end()) - z.begin());
    if (p.intent != ActionKind::move_to) {
        p.action = Action::of(p.intent);
        return p;
    }
    p.tags = viterbi(emit_, trans_, token_features(s, b, c), c);
    if (auto a = action_from_tags(c, p.tags)) {
        p.action = *a;
    } else {
        p.fallback = true;
        p.action = c.priors.front().action;
    }
    return p;
}

DistilledPolicy train_distilled(const Dataset& d, const SimPlanner& oracle, const TrainConfig& cfg) {
    if (d.examples.empty()) throw DatasetError("empty dataset");
    const Building& b = oracle.building();
    DistilledPolicy pol;
    struct Row {
        std::vector<int> feats;
        int label;
        Context ctx;
        std::vector<std::vector<std::uint64_t>> tf;
        std::vector<Tag> gold;
    };
    std::vector<Row> rows;
    rows.reserve(d.examples.size());
    for (const auto& e : d.examples) {
        Row r;
        r.ctx = context(e.state, b, oracle);
        for (auto f : pepa::intent_features(e.state, b, r.ctx)) {
            auto [it, fresh] = pol.intent_index_.try_emplace(f, static_cast<int>(pol.intent_index_.size()));
            r.feats.push_back(it->second);
        }
        r.label = static_cast<int>(e.action.kind);
        if (e.action.is_move()) {
            r.tf = token_features(e.state, b, r.ctx);
            r.gold = gold_tags(r.ctx, e.action);
        }
        rows.push_back(std::move(r));
    }

    // intent head: one-vs-rest logistic regression, plain SGD
    const std::size_t nf = pol.intent_index_.size();
    pol.intent_w_.assign(kActionKindCount, std::vector<double>(nf, 0.0));
    pol.intent_b_.assign(kActionKindCount, 0.0);
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    for (int ep = 0; ep < cfg.intent_epochs; ++ep) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        const double lr = cfg.learning_rate / (1.0 + ep);
        for (auto idx : order) {
            const Row& r = rows[idx];
            for (std::size_t k = 0; k < kActionKindCount; ++k) {
                double z = pol.intent_b_[k];
                for (int f : r.feats) z += pol.intent_w_[k][static_cast<std::size_t>(f)];
                const double g = (r.label == static_cast<int>(k) ? 1.0 : 0.0) - sigmoid(z);
                pol.intent_b_[k] += lr * g;
                for (int f : r.feats) {
                    double& w = pol.intent_w_[k][static_cast<std::size_t>(f)];
                    w += lr * (g - cfg.l2 * w);
                }
            }
        }
    }

    // slot head: averaged structured perceptron
    using Emit = std::unordered_map<std::uint64_t, std::array<double, kTagCount>>;
    using Trans = std::array<std::array<double, kTagCount>, kTagCount + 1>;
    Emit w, u;
    Trans tw{}, tu{};
    double step = 1.0;
    auto update = [&](const Row& r, const std::vector<Tag>& tags, double sign) {
        for (std::size_t i = 0; i < tags.size(); ++i) {
            const auto t = static_cast<std::size_t>(tags[i]);
            for (auto f : r.tf[i]) {
                w[f][t] += sign;
                u[f][t] += sign * step;
            }
            const std::size_t prev = i == 0 ? kTagCount : static_cast<std::size_t>(tags[i - 1]);
            tw[prev][t] += sign;
            tu[prev][t] += sign * step;
        }
    };
    std::vector<std::size_t> moves;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].gold.empty()) moves.push_back(i);
    for (int ep = 0; ep < cfg.slot_epochs; ++ep) {
        for (std::size_t i = moves.size(); i > 1; --i) std::swap(moves[i - 1], moves[rng.below(i)]);
        for (auto idx : moves) {
            const Row& r = rows[idx];
            const auto pred = viterbi(w, tw, r.tf, r.ctx);
            if (pred != r.gold) {
                update(r, r.gold, +1.0);
                update(r, pred, -1.0);
            }
            step += 1.0;
        }
    }
    for (auto& [f, arr] : w) {
        const auto& acc = u[f];
        for (int t = 0; t < kTagCount; ++t) arr[static_cast<std::size_t>(t)] -= acc[static_cast<std::size_t>(t)] / step;
    }
    for (std::size_t i = 0; i <= kTagCount; ++i)
        for (std::size_t t = 0; t < kTagCount; ++t) tw[i][t] -= tu[i][t] / step;
    pol.emit_ = std::move(w);
    pol.trans_ = tw;
    return pol;
}

double agreement(const DistilledPolicy& p, const Dataset& d, const SimPlanner& oracle) {
    if (d.examples.empty()) return 0.0;
    int hit = 0;
    for (const auto& e : d.examples) hit += p.predict(e.state, oracle.building(), oracle).action == e.action;
    return static_cast<double>(hit) / static_cast<double>(d.examples.size());
}

// ---------------------------------------------------------------- io

json DistilledPolicy::to_json() const {
    // features in index order keep the file deterministic
    std::vector<std::uint64_t> feats(intent_index_.size());
    for (const auto& [f, i] : intent_index_) feats[static_cast<std::size_t>(i)] = f;
    json fj = json::array();
    for (auto f : feats) fj.push_back(hex64(f));
    std::vector<std::uint64_t> ekeys;
    for (const auto& [f, _] : emit_) ekeys.push_back(f);
    std::sort(ekeys.begin(), ekeys.end());
    json ej = json::object();
    for (auto f : ekeys) ej[hex64(f)] = emit_.at(f);
    return {{"schema", "pepa.distilled"},
            {"version", kFormatVersion},
            {"intent", {{"features", fj}, {"weights", intent_w_}, {"bias", intent_b_}}},
            {"slot", {{"emission", ej}, {"transition", trans_}}}};
}

DistilledPolicy DistilledPolicy::from_json(const json& j) {
    if (j.value("schema", "") != "pepa.distilled")
        throw DatasetError("not a distilled policy file");
    if (j.value("version", 0) != kFormatVersion)
        throw DatasetError("unsupported policy version " + std::to_string(j.value("version", 0)));
    DistilledPolicy p;
    const auto& in = j.at("intent");
    const auto& feats = in.at("features");
    for (std::size_t i = 0; i < feats.size(); ++i)
        p.intent_index_[std::stoull(feats[i].get<std::string>(), nullptr, 16)] = static_cast<int>(i);
    p.intent_w_ = in.at("weights").get<std::vector<std::vector<double>>>();
    p.intent_b_ = in.at("bias").get<std::vector<double>>();
    if (p.intent_w_.size() != kActionKindCount || p.intent_b_.size() != kActionKindCount)
        throw DatasetError("intent head must have one row per action kind");
    for (const auto& row : p.intent_w_)
        if (row.size() != feats.size()) throw DatasetError("intent weight row size mismatch");
    for (const auto& [k, v] : j.at("slot").at("emission").items())
        p.emit_[std::stoull(k, nullptr, 16)] = v.get<std::array<double, kTagCount>>();
    p.trans_ = j.at("slot").at("transition").get<std::array<std::array<double, kTagCount>, kTagCount + 1>>();
    return p;
}

void DistilledPolicy::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    out << to_json().dump() << "\n";
    if (!out) throw DatasetError("cannot write " + path.string());
}

DistilledPolicy DistilledPolicy::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open " + path.string());
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw DatasetError(path.string() + ": " + e.what());
    }
}

}  // namespace pepa
