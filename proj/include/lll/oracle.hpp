#pragma once

// Brute-force checks. Nothing here reads the searchers' indexes or lists;
// every check works from the raw instance and the candidate answer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lll/apps/graph.hpp"
#include "lll/apps/hypergraph.hpp"
#include "lll/apps/ramsey.hpp"
#include "lll/error.hpp"
#include "lll/events.hpp"
#include "lll/space.hpp"
#include "lll/stats.hpp"

namespace lll {

/// Exact P(event) by recursion over the scope's joint values.
inline double exhaustive_event_prob(const ProductSpace& space, const BadEvent& e, double limit = 1e7) {
    double states = 1.0;
    for (auto v : e.scope) states *= static_cast<double>(space.domain_size(v));
    require(states <= limit, ErrorKind::TooLarge, "joint domain too large for enumeration");
    std::vector<int> vals(e.scope.size());
    std::function<double(std::size_t, double)> rec = [&](std::size_t j, double w) -> double {
        if (w == 0.0) return 0.0;
        if (j == vals.size()) return e.predicate(std::span<const int>(vals.data(), vals.size())) ? w : 0.0;
        double s = 0.0;
        const auto& p = space.probs(e.scope[j]);
        for (std::size_t a = 0; a < p.size(); ++a) {
            vals[j] = static_cast<int>(a);
            s += rec(j + 1, w * p[a]);
        }
        return s;
    };
    return rec(0, 1.0);
}

struct StructureCheck {
    bool pass = true;
    std::vector<int> witness;  // offending path, clique, edge, or cell rows
    std::uint64_t examined = 0;
};

namespace detail {

/// Visits every simple path (as a vertex list, both orientations) with at
/// most max_vertices vertices. visit returns false to stop.
inline void each_simple_path(const Graph& g, std::size_t max_vertices, std::uint64_t budget, std::uint64_t& examined,
                             const std::function<bool(const std::vector<int>&)>& visit) {
    std::vector<int> path;
    std::vector<char> on(g.n, 0);
    bool stop = false;
    std::function<void(int)> dfs = [&](int v) {
        path.push_back(v);
        on[static_cast<std::size_t>(v)] = 1;
        require(++examined <= budget, ErrorKind::TooLarge, "path enumeration budget exceeded");
        if (!visit(path)) stop = true;
        if (!stop && path.size() < max_vertices)
            for (int u : g.adj[static_cast<std::size_t>(v)]) {
                if (on[static_cast<std::size_t>(u)]) continue;
                dfs(u);
                if (stop) break;
            }
        on[static_cast<std::size_t>(v)] = 0;
        path.pop_back();
    };
    for (std::size_t v = 0; v < g.n && !stop; ++v) dfs(static_cast<int>(v));
}

}  // namespace detail

/// No simple path is colored with k equal consecutive blocks of length
/// <= max_len (0: any length).
inline StructureCheck check_nonrepetitive(const Graph& g, const std::vector<int>& color, std::size_t k = 2,
                                          std::size_t max_len = 0, std::uint64_t budget = 2'000'000'000) {
    StructureCheck r;
    const std::size_t top = max_len ? std::min(max_len * k, g.n) : g.n;
    detail::each_simple_path(g, top, budget, r.examined, [&](const std::vector<int>& p) {
        if (p.size() % k) return true;
        const std::size_t l = p.size() / k;
        for (std::size_t i = l; i < p.size(); ++i)
            if (color[static_cast<std::size_t>(p[i])] != color[static_cast<std::size_t>(p[i - l])]) return true;
        r.pass = false;
        r.witness = p;
        return false;
    });
    return r;
}

/// All repetitively colored paths (k blocks), each listed once with the
/// smaller endpoint first.
inline std::vector<std::vector<int>> all_repetitions(const Graph& g, const std::vector<int>& color, std::size_t k = 2,
                                                     std::size_t max_len = 0, std::uint64_t budget = 2'000'000'000) {
    std::vector<std::vector<int>> out;
    std::uint64_t examined = 0;
    const std::size_t top = max_len ? std::min(max_len * k, g.n) : g.n;
    detail::each_simple_path(g, top, budget, examined, [&](const std::vector<int>& p) {
        if (p.size() % k || p.front() > p.back()) return true;
        const std::size_t l = p.size() / k;
        for (std::size_t i = l; i < p.size(); ++i)
            if (color[static_cast<std::size_t>(p[i])] != color[static_cast<std::size_t>(p[i - l])]) return true;
        out.push_back(p);
        return true;
    });
    std::sort(out.begin(), out.end());
    return out;
}

/// All simple paths x y, |x| = |y|, agreeing in at least ceil(rho |x|) places.
inline std::vector<std::vector<int>> all_similar(const Graph& g, const std::vector<int>& color, double rho,
                                                 std::uint64_t budget = 2'000'000'000) {
    std::vector<std::vector<int>> out;
    std::uint64_t examined = 0;
    detail::each_simple_path(g, g.n, budget, examined, [&](const std::vector<int>& p) {
        if (p.size() % 2 || p.front() > p.back()) return true;
        const std::size_t l = p.size() / 2;
        std::size_t agree = 0;
        for (std::size_t i = 0; i < l; ++i)
            agree += color[static_cast<std::size_t>(p[i])] == color[static_cast<std::size_t>(p[i + l])];
        if (static_cast<double>(agree) >= std::ceil(rho * static_cast<double>(l) - 1e-9)) out.push_back(p);
        return true;
    });
    std::sort(out.begin(), out.end());
    return out;
}

inline StructureCheck check_similar_free(const Graph& g, const std::vector<int>& color, double rho,
                                         std::uint64_t budget = 2'000'000'000) {
    StructureCheck r;
    auto all = all_similar(g, color, rho, budget);
    if (!all.empty()) {
        r.pass = false;
        r.witness = all.front();
    }
    return r;
}

/// pi is a permutation and the cells (x, pi(x)) carry distinct colors.
inline StructureCheck check_transversal(const std::vector<std::vector<int>>& cells, const std::vector<int>& pi) {
    StructureCheck r;
    const std::size_t n = cells.size();
    std::vector<char> col_seen(n, 0);
    for (std::size_t x = 0; x < pi.size(); ++x) {
        if (pi.size() != n || pi[x] < 0 || static_cast<std::size_t>(pi[x]) >= n || col_seen[static_cast<std::size_t>(pi[x])]) {
            r.pass = false;
            r.witness = {static_cast<int>(x)};
            return r;
        }
        col_seen[static_cast<std::size_t>(pi[x])] = 1;
    }
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) {
            ++r.examined;
            if (cells[x][static_cast<std::size_t>(pi[x])] == cells[y][static_cast<std::size_t>(pi[y])]) {
                r.pass = false;
                r.witness = {static_cast<int>(x), static_cast<int>(y)};
                return r;
            }
        }
    return r;
}

/// Every edge sees both colors.
inline StructureCheck check_hyp2col(const HypInstance& h, const std::vector<int>& color) {
    StructureCheck r;
    for (const auto& e : h.edges) {
        ++r.examined;
        bool seen[2] = {false, false};
        for (int v : e) seen[color[static_cast<std::size_t>(v)] & 1] = true;
        if (!(seen[0] && seen[1])) {
            r.pass = false;
            r.witness = e;
            return r;
        }
    }
    return r;
}

/// Walks every k-subset of vertices in lexicographic order.
inline StructureCheck check_clique_free(const EdgeColoring& g, std::size_t k) {
    StructureCheck r;
    if (k > g.n || k < 2) return r;
    std::vector<int> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = static_cast<int>(i);
    while (true) {
        ++r.examined;
        const int c = g.color(s[0], s[1]);
        bool mono = true;
        for (std::size_t i = 0; i < k && mono; ++i)
            for (std::size_t j = i + 1; j < k && mono; ++j) mono = g.color(s[i], s[j]) == c;
        if (mono) {
            r.pass = false;
            r.witness = s;
            return r;
        }
        std::size_t i = k;
        while (i > 0 && static_cast<std::size_t>(s[i - 1]) == g.n - k + i - 1) --i;
        if (i == 0) break;
        ++s[i - 1];
        for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
    }
    return r;
}

/// Every monochromatic k-clique, by subset enumeration.
inline std::vector<std::vector<int>> all_mono_cliques(const EdgeColoring& g, std::size_t k) {
    std::vector<std::vector<int>> out;
    if (k > g.n || k < 2) return out;
    std::vector<int> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = static_cast<int>(i);
    while (true) {
        const int c = g.color(s[0], s[1]);
        bool mono = true;
        for (std::size_t i = 0; i < k && mono; ++i)
            for (std::size_t j = i + 1; j < k && mono; ++j) mono = g.color(s[i], s[j]) == c;
        if (mono) out.push_back(s);
        std::size_t i = k;
        while (i > 0 && static_cast<std::size_t>(s[i - 1]) == g.n - k + i - 1) --i;
        if (i == 0) break;
        ++s[i - 1];
        for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
    }
    return out;
}

/// P(edge all one given color and every rank above ln k / 2k): the 2^k colorings
/// are enumerated and the minimum-rank density k (1-x)^(k-1) is integrated
/// on a midpoint grid.
inline double hyp_p1_grid(std::size_t k, std::size_t cells = 200000) {
    const double kk = static_cast<double>(k), R = std::log(kk) / (2.0 * kk);
    std::uint64_t blue = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) blue += mask == 0;
    const double color_mass = static_cast<double>(blue) / static_cast<double>(std::uint64_t(1) << k);
    const double h = (1.0 - R) / static_cast<double>(cells);
    double s = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const double x = R + (static_cast<double>(i) + 0.5) * h;
        s += kk * std::pow(1.0 - x, kk - 1.0);
    }
    return color_mass * s * h;
}

}  // namespace lll
