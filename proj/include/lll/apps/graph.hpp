#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lll/error.hpp"
#include "lll/rng.hpp"

namespace lll {

/// Simple undirected graph on vertices 0..n-1 with sorted adjacency lists.
struct Graph {
    std::size_t n = 0;
    std::vector<std::vector<int>> adj;

    Graph() = default;
    explicit Graph(std::size_t n_) : n(n_), adj(n_) {}

    bool has_edge(int u, int v) const {
        const auto& a = adj[static_cast<std::size_t>(u)];
        return std::binary_search(a.begin(), a.end(), v);
    }

    /// Adds u-v unless it is a loop or already present. Returns whether it was added.
    bool add_edge(int u, int v) {
        require(u >= 0 && v >= 0 && static_cast<std::size_t>(u) < n && static_cast<std::size_t>(v) < n,
                ErrorKind::InvalidArgument, "edge endpoint out of range");
        if (u == v || has_edge(u, v)) return false;
        auto& a = adj[static_cast<std::size_t>(u)];
        a.insert(std::lower_bound(a.begin(), a.end(), v), v);
        auto& b = adj[static_cast<std::size_t>(v)];
        b.insert(std::lower_bound(b.begin(), b.end(), u), u);
        return true;
    }

    std::size_t degree(int v) const { return adj[static_cast<std::size_t>(v)].size(); }

    std::size_t max_degree() const {
        std::size_t d = 0;
        for (const auto& a : adj) d = std::max(d, a.size());
        return d;
    }

    std::size_t edge_count() const {
        std::size_t s = 0;
        for (const auto& a : adj) s += a.size();
        return s / 2;
    }

    static Graph path(std::size_t n) {
        Graph g(n);
        for (std::size_t i = 1; i < n; ++i) g.add_edge(static_cast<int>(i - 1), static_cast<int>(i));
        return g;
    }

    static Graph cycle(std::size_t n) {
        Graph g = path(n);
        if (n > 2) g.add_edge(static_cast<int>(n - 1), 0);
        return g;
    }

    /// Random graph with maximum degree at most delta: a Hamiltonian path keeps
    /// it connected when delta >= 2, then random edges fill free degree.
    static Graph random_bounded(std::size_t n, std::size_t delta, std::uint64_t seed) {
        require(delta >= 1, ErrorKind::InvalidArgument, "delta must be positive");
        Graph g(n);
        CounterRng rng(seed, 0x6772);
        std::vector<int> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        if (delta >= 2)
            for (std::size_t i = 1; i < n; ++i) g.add_edge(order[i - 1], order[i]);
        if (n < 2) return g;
        for (std::size_t tries = 0; tries < 20 * n * delta; ++tries) {
            const int u = static_cast<int>(rng.below(n)), v = static_cast<int>(rng.below(n));
            if (g.degree(u) >= delta || g.degree(v) >= delta) continue;
            g.add_edge(u, v);
        }
        return g;
    }
};

/// Per-vertex neighbours sorted by (color, id), kept current under recoloring.
class ColorIndex {
public:
    ColorIndex() = default;
    ColorIndex(const Graph& g, const std::vector<int>& color) : g_(&g), color_(&color), by_color_(g.n) {
        for (std::size_t v = 0; v < g.n; ++v) {
            auto& l = by_color_[v];
            for (int u : g.adj[v]) l.emplace_back(color[static_cast<std::size_t>(u)], u);
            std::sort(l.begin(), l.end());
        }
    }

    /// Neighbours of v colored c, as a contiguous range of (color, id).
    std::pair<const std::pair<int, int>*, const std::pair<int, int>*> with_color(int v, int c) const {
        const auto& l = by_color_[static_cast<std::size_t>(v)];
        auto lo = std::lower_bound(l.begin(), l.end(), std::make_pair(c, -1));
        auto hi = std::lower_bound(lo, l.end(), std::make_pair(c + 1, -1));
        return {l.data() + (lo - l.begin()), l.data() + (hi - l.begin())};
    }

    /// Call after color[v] changed from old_color.
    void recolor(int v, int old_color) {
        const int c = (*color_)[static_cast<std::size_t>(v)];
        if (c == old_color) return;
        for (int u : g_->adj[static_cast<std::size_t>(v)]) {
            auto& l = by_color_[static_cast<std::size_t>(u)];
            auto it = std::lower_bound(l.begin(), l.end(), std::make_pair(old_color, v));
            require(it != l.end() && *it == std::make_pair(old_color, v), ErrorKind::InvariantViolation,
                    "color index out of date");
            l.erase(it);
            l.insert(std::lower_bound(l.begin(), l.end(), std::make_pair(c, v)), std::make_pair(c, v));
        }
    }

    /// Compares against a rebuild from the current colors.
    bool audit() const {
        ColorIndex fresh(*g_, *color_);
        return fresh.by_color_ == by_color_;
    }

private:
    const Graph* g_ = nullptr;
    const std::vector<int>* color_ = nullptr;
    std::vector<std::vector<std::pair<int, int>>> by_color_;
};

}  // namespace lll
