#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lll/analysis.hpp"
#include "lll/engine.hpp"
#include "lll/error.hpp"
#include "lll/events.hpp"
#include "lll/instances.hpp"
#include "lll/stats.hpp"

namespace lll {

/// Rooted labelled tree. Node 0 is the root; nodes are kept in creation order.
/// A root labelled kProbe stands for an event E outside the bad family.
class WitnessTree {
public:
    static constexpr std::size_t kProbe = std::numeric_limits<std::size_t>::max();

    struct Node {
        std::size_t label;
        std::size_t parent;  // kProbe for the root
        std::size_t depth;
    };

    WitnessTree() = default;
    explicit WitnessTree(std::size_t root_label) { nodes_.push_back({root_label, kProbe, 0}); }

    std::size_t add(std::size_t label, std::size_t parent) {
        nodes_.push_back({label, parent, nodes_[parent].depth + 1});
        return nodes_.size() - 1;
    }
    void pop() { nodes_.pop_back(); }

    std::size_t size() const { return nodes_.size(); }
    const Node& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t root_label() const { return nodes_.front().label; }
    bool probe_rooted() const { return root_label() == kProbe; }

    std::size_t count_label(std::size_t label) const {
        return static_cast<std::size_t>(
            std::count_if(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.label == label; }));
    }

    std::size_t depth() const {
        std::size_t d = 0;
        for (const auto& n : nodes_) d = std::max(d, n.depth);
        return d;
    }

    /// Product of label probabilities; root_prob is used for a probe root.
    double weight(const BadEventFamily& family, double root_prob = 1.0) const {
        double w = 1.0;
        for (const auto& n : nodes_) w *= n.label == kProbe ? root_prob : family[n.label].prob;
        return w;
    }

    /// Order-free form: label(children sorted).
    std::string canonical() const {
        std::vector<std::vector<std::size_t>> kids(nodes_.size());
        for (std::size_t i = 1; i < nodes_.size(); ++i) kids[nodes_[i].parent].push_back(i);
        std::function<std::string(std::size_t)> rec = [&](std::size_t v) {
            std::string s = nodes_[v].label == kProbe ? "E" : std::to_string(nodes_[v].label);
            if (kids[v].empty()) return s;
            std::vector<std::string> parts;
            for (auto c : kids[v]) parts.push_back(rec(c));
            std::sort(parts.begin(), parts.end());
            s += '(';
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (i) s += ',';
                s += parts[i];
            }
            s += ')';
            return s;
        };
        return rec(0);
    }

private:
    std::vector<Node> nodes_;
};

/// Dependency of a bad event on the tree's root when that root is a probe.
using ProbeRelation = std::vector<char>;

inline ProbeRelation probe_relation(const DependencyGraph& graph, const std::vector<std::size_t>& scope) {
    ProbeRelation rel(graph.size(), 0);
    for (auto b : graph.neighborhood_of_scope(scope)) rel[b] = 1;
    return rel;
}

namespace detail {

inline bool related(const WitnessTree::Node& n, std::size_t b, const DependencyGraph& g, const ProbeRelation* probe) {
    if (n.label == WitnessTree::kProbe) return probe && (*probe)[b];
    return g.dependent(n.label, b);
}

// Backward pass over events[0..upto): each one goes under the deepest node
// it depends on; ties go to the earliest-created node.
inline void grow_backward(WitnessTree& tree, const std::vector<std::size_t>& events, std::size_t upto,
                          const DependencyGraph& g, const ProbeRelation* probe) {
    for (std::size_t t = upto; t-- > 0;) {
        const std::size_t b = events[t];
        std::size_t best = WitnessTree::kProbe;
        for (std::size_t i = 0; i < tree.size(); ++i)
            if (related(tree.node(i), b, g, probe) &&
                (best == WitnessTree::kProbe || tree.node(i).depth > tree.node(best).depth))
                best = i;
        if (best != WitnessTree::kProbe) tree.add(b, best);
    }
}

}  // namespace detail

/// tau^k for the k-th resampling (1-based) of the sequence B^1..B^T.
inline WitnessTree build_tree(const std::vector<std::size_t>& events, std::size_t k, const DependencyGraph& g) {
    require(k >= 1 && k <= events.size(), ErrorKind::InvalidArgument,
            "witness index " + std::to_string(k) + " outside 1.." + std::to_string(events.size()));
    WitnessTree tree(events[k - 1]);
    detail::grow_backward(tree, events, k - 1, g, nullptr);
    return tree;
}

inline WitnessTree build_tree(const ResampleLog& log, std::size_t k, const DependencyGraph& g) {
    return build_tree(log.events(), k, g);
}

/// Tree rooted at an outside event E, built from the first k resamplings
/// (E is taken to hold on X^k). With forced_child set this is the E/B tree:
/// B^k sits directly under E whether or not the two are related.
inline WitnessTree build_event_tree(const std::vector<std::size_t>& events, std::size_t k, const ProbeRelation& rel,
                                    const DependencyGraph& g, bool forced_child = false) {
    require(k <= events.size(), ErrorKind::InvalidArgument, "witness index past the end of the log");
    WitnessTree tree(WitnessTree::kProbe);
    std::size_t upto = k;
    if (forced_child) {
        require(k >= 1, ErrorKind::InvalidArgument, "an E/B tree needs k >= 1");
        tree.add(events[k - 1], 0);
        upto = k - 1;
    }
    detail::grow_backward(tree, events, upto, g, &rel);
    return tree;
}

/// Child related to parent, and labels at one depth pairwise unrelated. The
/// first child of a probe root is exempt from the parent check when
/// forced_child is set.
inline bool valid_structure(const WitnessTree& tree, const DependencyGraph& g, const ProbeRelation* rel = nullptr,
                            bool forced_child = false) {
    for (std::size_t i = 1; i < tree.size(); ++i) {
        const auto& n = tree.node(i);
        if (n.label == WitnessTree::kProbe || n.label >= g.size()) return false;
        const bool exempt = forced_child && i == 1 && n.parent == 0;
        if (!exempt && !detail::related(tree.node(n.parent), n.label, g, rel)) return false;
        for (std::size_t j = 1; j < i; ++j)
            if (tree.node(j).depth == n.depth && g.dependent(tree.node(j).label, n.label)) return false;
    }
    return true;
}

struct StructureSet {
    std::vector<WitnessTree> trees;
    std::vector<double> weights;
    bool truncated = false;  // hit the structure cap
    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

/// All tree-structures with the given root and weight >= cutoff, built level
/// by level. root = bad event id, or kProbe with (root_prob, rel). A forced
/// child gives E/B structures.
inline StructureSet enumerate_structures(std::size_t root, const BadEventFamily& family, const DependencyGraph& g,
                                         double cutoff, std::size_t cap = 100000, double root_prob = 1.0,
                                         const ProbeRelation* rel = nullptr,
                                         std::optional<std::size_t> forced_child = std::nullopt) {
    StructureSet out;
    WitnessTree tree(root);
    const double w0 = root == WitnessTree::kProbe ? root_prob : family[root].prob;
    if (w0 < cutoff) return out;

    auto candidates = [&](std::size_t label) {
        std::vector<std::size_t> c;
        if (label == WitnessTree::kProbe) {
            for (std::size_t b = 0; b < g.size(); ++b)
                if (rel && (*rel)[b]) c.push_back(b);
        } else {
            c = g.neighbors(label);
        }
        return c;
    };

    std::function<void(const std::vector<std::size_t>&, double)> level;
    std::function<void(const std::vector<std::size_t>&, std::size_t, std::vector<std::size_t>&, double)> per_node;
    std::function<void(const std::vector<std::size_t>&, std::size_t, const std::vector<std::size_t>&, std::size_t,
                       std::vector<std::size_t>&, double)>
        subset;

    auto unrelated_to_all = [&](std::size_t b, const std::vector<std::size_t>& next) {
        for (auto node : next)
            if (g.dependent(tree.node(node).label, b)) return false;
        return true;
    };

    level = [&](const std::vector<std::size_t>& nodes, double w) {
        if (out.trees.size() >= cap) {
            out.truncated = true;
            return;
        }
        std::vector<std::size_t> next;
        if (tree.size() == 1 && forced_child) {
            const double wf = w * family[*forced_child].prob;
            if (wf < cutoff) return;
            next.push_back(tree.add(*forced_child, 0));
            per_node(nodes, 0, next, wf);
            tree.pop();
            return;
        }
        per_node(nodes, 0, next, w);
    };

    per_node = [&](const std::vector<std::size_t>& nodes, std::size_t i, std::vector<std::size_t>& next, double w) {
        if (out.truncated) return;
        if (i == nodes.size()) {
            if (next.empty()) {
                if (out.trees.size() >= cap) {
                    out.truncated = true;
                    return;
                }
                out.trees.push_back(tree);
                out.weights.push_back(w);
            } else {
                const std::vector<std::size_t> frozen = next;
                level(frozen, w);
            }
            return;
        }
        const auto cand = candidates(tree.node(nodes[i]).label);
        subset(nodes, i, cand, 0, next, w);
    };

    subset = [&](const std::vector<std::size_t>& nodes, std::size_t i, const std::vector<std::size_t>& cand,
                 std::size_t j, std::vector<std::size_t>& next, double w) {
        if (out.truncated) return;
        if (j == cand.size()) {
            per_node(nodes, i + 1, next, w);
            return;
        }
        subset(nodes, i, cand, j + 1, next, w);
        const std::size_t b = cand[j];
        const double wb = w * family[b].prob;
        if (wb >= cutoff && unrelated_to_all(b, next)) {
            next.push_back(tree.add(b, nodes[i]));
            subset(nodes, i, cand, j + 1, next, wb);
            next.pop_back();
            tree.pop();
        }
    };

    level({0}, w0);
    return out;
}

struct WtlReport {
    std::uint64_t trials = 0;
    std::vector<std::string> canonical;
    std::vector<double> weight;
    std::vector<double> frequency;
    std::vector<double> sigma;
    std::vector<double> hoeffding;
    std::vector<bool> violated;
    std::size_t violations = 0;
    std::uint64_t failed_runs = 0;
};

/// Appearance frequency of each structure (counted once per run) against its
/// weight. A violation is f - 3 sigma > w with sigma from the larger of the
/// two Bernoulli variances.
inline WtlReport verify_wtl(const ProductSpace& space, const BadEventFamily& family, const DependencyGraph& g,
                            const std::vector<WitnessTree>& structures, std::uint64_t trials, std::uint64_t seed,
                            const MtOptions& opt = {}, unsigned jobs = 1, bool use_dfs = false) {
    for (const auto& t : structures)
        require(!t.probe_rooted() && valid_structure(t, g), ErrorKind::InvalidArgument,
                "invalid tree-structure " + t.canonical());
    std::unordered_map<std::string, std::size_t> index;
    WtlReport rep;
    rep.trials = trials;
    for (std::size_t i = 0; i < structures.size(); ++i) {
        rep.canonical.push_back(structures[i].canonical());
        rep.weight.push_back(structures[i].weight(family));
        index.emplace(rep.canonical.back(), i);
    }
    const std::size_t S = structures.size();
    std::vector<std::string> names(S + 1);
    for (std::size_t i = 0; i < S; ++i) names[i] = "s" + std::to_string(i);
    names[S] = "failed";
    MtOptions o = opt;
    o.record_log = true;
    auto mc = mc_run(names, trials, seed, [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
        auto r = use_dfs ? run_mt_dfs(space, family, g, rng, o) : run_mt(space, family, rng, o);
        out[S] = r.ok() ? 0.0 : 1.0;
        const auto ev = r.log.events();
        std::unordered_set<std::size_t> seen;
        for (std::size_t k = 1; k <= ev.size(); ++k) {
            auto it = index.find(build_tree(ev, k, g).canonical());
            if (it != index.end()) seen.insert(it->second);
        }
        for (auto s : seen) out[s] = 1.0;
    }, jobs);
    for (std::size_t i = 0; i < S; ++i) {
        const auto& st = mc.stats[i];
        rep.frequency.push_back(st.mean);
        rep.sigma.push_back(bernoulli_sigma(st.mean, rep.weight[i], trials));
        rep.hoeffding.push_back(st.hoeffding);
        const bool bad = st.mean - 3.0 * rep.sigma.back() > rep.weight[i];
        rep.violated.push_back(bad);
        rep.violations += bad;
    }
    rep.failed_runs = static_cast<std::uint64_t>(mc.stats[S].mean * static_cast<double>(trials) + 0.5);
    return rep;
}

/// Number of t >= 1 with E true on X^t and B^t = b, from a recorded run.
inline std::uint64_t internal_count(const BadEventFamily& family, const ResampleLog& log, const ProbeEvent& E,
                                    std::size_t b) {
    const auto states = replay(family, log);
    std::uint64_t c = 0;
    for (std::size_t t = 1; t < states.size(); ++t)
        if (log.entries[t - 1].event == b && E.holds(states[t])) ++c;
    return c;
}

}  // namespace lll
