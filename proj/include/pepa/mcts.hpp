#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pepa/rng.hpp"

namespace pepa {

struct PlannerConfig {
    double c = 1.414;
    double gamma = 0.99;
    int budget = 300;
    int rollout_depth = 20;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

/// q + c * sqrt(ln(n_parent) / n_edge). Throws std::domain_error unless
/// both counts are at least 1.
double uct_score(double q, double n_parent, double n_edge, double c);

class OracleError : public std::runtime_error {
public:
    OracleError(int iteration, const std::string& what)
        : std::runtime_error("oracle failed at iteration " + std::to_string(iteration) + ": " + what),
          iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

class ExpansionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class TreeError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

template <class A>
struct Candidate {
    A action;
    double prior = 0.0;
};

/// Result of applying one (possibly multi-tick) action. `discount` is the
/// factor applied to values backed up from the successor: gamma^ticks.
template <class S>
struct Transition {
    S next;
    double reward = 0.0;
    double discount = 1.0;
    bool terminal = false;
};

template <class M>
concept SearchModel = requires(const M& m, const typename M::State& s, const typename M::Action& a, Rng& rng,
                               double gamma) {
    { m.digest(s) } -> std::convertible_to<std::uint64_t>;
    { m.is_terminal(s) } -> std::convertible_to<bool>;
    { m.step(s, a, rng, gamma) } -> std::convertible_to<Transition<typename M::State>>;
};

/// Node store of one search. Nodes are keyed by state digest; an edge's
/// successors are the distinct outcomes sampled so far.
template <class S, class A>
class SearchTree {
public:
    struct Edge {
        A action;
        double prior = 0.0;
        int n = 0;
        double q = 0.0;
        std::vector<int> children;  // node indices, in first-seen order
    };
    struct Node {
        S state;
        std::uint64_t digest = 0;
        int n = 0;
        bool expanded = false;
        bool terminal = false;
        std::vector<Edge> edges;
    };
    struct Step {
        int node;
        int edge;
        double reward;
        double discount;
    };

    int add(S state, std::uint64_t digest, bool terminal) {
        const auto [it, fresh] = index_.try_emplace(digest, static_cast<int>(nodes_.size()));
        if (fresh) nodes_.push_back(Node{std::move(state), digest, 0, false, terminal, {}});
        return it->second;
    }

    std::size_t size() const { return nodes_.size(); }
    Node& node(int i) { return nodes_.at(static_cast<std::size_t>(i)); }
    const Node& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
    const std::vector<Node>& nodes() const { return nodes_; }

    /// Attaches the oracle's candidates to an unexpanded node.
    void expand(int i, std::vector<Candidate<A>> candidates) {
        Node& nd = node(i);
        if (nd.expanded) throw ExpansionError("node already expanded");
        if (candidates.empty()) throw ExpansionError("prior oracle returned no candidates");
        nd.edges.reserve(candidates.size());
        for (auto& c : candidates) nd.edges.push_back(Edge{std::move(c.action), c.prior, 0, 0.0, {}});
        nd.expanded = true;
    }

    /// Backs `value` (the leaf estimate) up along `path`, which must run
    /// from the root to `leaf`.
    void backpropagate(const std::vector<Step>& path, int leaf, double value) {
        for (std::size_t k = 0; k < path.size(); ++k) {
            const auto& st = path[k];
            if (st.node < 0 || static_cast<std::size_t>(st.node) >= nodes_.size())
                throw TreeError("path node outside the tree");
            const Node& nd = nodes_[static_cast<std::size_t>(st.node)];
            if (st.edge < 0 || static_cast<std::size_t>(st.edge) >= nd.edges.size())
                throw TreeError("path edge outside the tree");
            const int next = k + 1 < path.size() ? path[k + 1].node : leaf;
            const auto& ch = nd.edges[static_cast<std::size_t>(st.edge)].children;
            if (std::find(ch.begin(), ch.end(), next) == ch.end()) throw TreeError("path is not connected");
        }
        double g = value;
        node(leaf).n += 1;
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            g = it->reward + it->discount * g;
            Edge& e = node(it->node).edges[static_cast<std::size_t>(it->edge)];
            e.n += 1;
            e.q += (g - e.q) / e.n;
            node(it->node).n += 1;
            if (on_backup) on_backup(it->node, it->edge, g);
        }
    }

    /// Unvisited edges first (highest prior, then lowest index); otherwise
    /// the UCT maximum with the same tie-break.
    int select_edge(int i, double c) const {
        const Node& nd = node(i);
        int best = -1;
        for (std::size_t k = 0; k < nd.edges.size(); ++k) {
            const Edge& e = nd.edges[k];
            if (e.n == 0 && (best < 0 || e.prior > nd.edges[static_cast<std::size_t>(best)].prior))
                best = static_cast<int>(k);
        }
        if (best >= 0) return best;
        double best_score = -INFINITY;
        for (std::size_t k = 0; k < nd.edges.size(); ++k) {
            const Edge& e = nd.edges[k];
            const double s = uct_score(e.q, nd.n, e.n, c);
            if (s > best_score || (s == best_score && e.prior > nd.edges[static_cast<std::size_t>(best)].prior)) {
                best_score = s;
                best = static_cast<int>(k);
            }
        }
        return best;
    }

    /// Highest visit count, ties by prior then index.
    int best_edge(int i) const {
        const Node& nd = node(i);
        int best = 0;
        for (std::size_t k = 1; k < nd.edges.size(); ++k) {
            const Edge& e = nd.edges[k];
            const Edge& b = nd.edges[static_cast<std::size_t>(best)];
            if (e.n > b.n || (e.n == b.n && e.prior > b.prior)) best = static_cast<int>(k);
        }
        return best;
    }

    /// Called with (node, edge, backed-up return) for every edge update.
    std::function<void(int, int, double)> on_backup;

private:
    std::vector<Node> nodes_;
    std::unordered_map<std::uint64_t, int> index_;
};

template <class A>
struct EdgeStats {
    A action;
    double prior = 0.0;
    int n = 0;
    double q = 0.0;
};

template <class A>
struct SearchResult {
    A action;
    std::vector<EdgeStats<A>> root_edges;
    int root_visits = 0;
    std::size_t tree_size = 0;
};

template <class S, class A>
using PriorOracle = std::function<std::vector<Candidate<A>>(const S&)>;

/// Value estimate of a non-terminal leaf, in the units of the model reward.
template <class S>
using ValueOracle = std::function<double(const S&, Rng&)>;

/// Leaf value: 0 at a terminal node (its reward was paid on the way in),
/// otherwise the oracle estimate.
template <class S>
double simulate_rollout(const S& state, bool terminal, const ValueOracle<S>& value, Rng& rng) {
    if (terminal) return 0.0;
    return value(state, rng);
}

/// Runs `budget` select/expand/simulate/backpropagate iterations from
/// `root`. `tree_out`, when given, receives the final tree.
template <SearchModel M>
SearchResult<typename M::Action> mcts_search(const M& model, const typename M::State& root,
                                             const PriorOracle<typename M::State, typename M::Action>& prior,
                                             const ValueOracle<typename M::State>& value, const PlannerConfig& cfg,
                                             SearchTree<typename M::State, typename M::Action>* tree_out = nullptr,
                                             std::function<void(int, int, double)> on_backup = {}) {
    using S = typename M::State;
    using A = typename M::Action;
    cfg.validate();
    if (model.is_terminal(root)) throw std::invalid_argument("mcts_search: root state is terminal");

    SearchTree<S, A> tree;
    tree.on_backup = std::move(on_backup);
    Rng rng(cfg.seed);
    const int root_id = tree.add(root, model.digest(root), false);
    std::vector<typename SearchTree<S, A>::Step> path;

    for (int it = 0; it < cfg.budget; ++it) {
        path.clear();
        int cur = root_id;
        // selection
        while (tree.node(cur).expanded && !tree.node(cur).terminal) {
            const int e = tree.select_edge(cur, cfg.c);
            const S from = tree.node(cur).state;
            Transition<S> tr = model.step(from, tree.node(cur).edges[static_cast<std::size_t>(e)].action, rng, cfg.gamma);
            const std::uint64_t d = model.digest(tr.next);
            const int child = tree.add(std::move(tr.next), d, tr.terminal);
            path.push_back({cur, e, tr.reward, tr.discount});
            cur = child;
            auto& ch = tree.node(path.back().node).edges[static_cast<std::size_t>(e)].children;
            if (std::find(ch.begin(), ch.end(), cur) == ch.end()) ch.push_back(cur);
            if (!tree.node(cur).expanded) break;
        }
        // expansion
        auto& leaf = tree.node(cur);
        if (!leaf.terminal && !leaf.expanded) {
            std::vector<Candidate<A>> cands;
            try {
                cands = prior(leaf.state);
            } catch (const std::exception& ex) {
                throw OracleError(it, ex.what());
            }
            tree.expand(cur, std::move(cands));
        }
        // simulation
        double v = 0.0;
        try {
            v = simulate_rollout<S>(tree.node(cur).state, tree.node(cur).terminal, value, rng);
        } catch (const std::exception& ex) {
            throw OracleError(it, ex.what());
        }
        tree.backpropagate(path, cur, v);
    }

    const auto& r = tree.node(root_id);
    SearchResult<A> out{r.edges[static_cast<std::size_t>(tree.best_edge(root_id))].action, {}, r.n, tree.size()};
    for (const auto& e : r.edges) out.root_edges.push_back({e.action, e.prior, e.n, e.q});
    if (tree_out) *tree_out = std::move(tree);
    return out;
}

}  // namespace pepa
