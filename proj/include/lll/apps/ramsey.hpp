#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <set>
#include <vector>

#include "lll/engine.hpp"
#include "lll/error.hpp"
#include "lll/rng.hpp"

namespace lll {

/// Two-coloring of the edges of K_n.
struct EdgeColoring {
    std::size_t n = 0;
    std::vector<std::uint8_t> colors;  // n x n, symmetric

    EdgeColoring() = default;
    explicit EdgeColoring(std::size_t n_, std::uint8_t c = 0) : n(n_), colors(n_ * n_, c) {}

    int color(int u, int v) const { return colors[static_cast<std::size_t>(u) * n + static_cast<std::size_t>(v)]; }
    void set(int u, int v, int c) {
        colors[static_cast<std::size_t>(u) * n + static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(c);
        colors[static_cast<std::size_t>(v) * n + static_cast<std::size_t>(u)] = static_cast<std::uint8_t>(c);
    }
};

/// Smallest n the clique bound is stated for: ceil(sqrt(2)/e k 2^(k/2)).
inline std::size_t ramsey_n(unsigned k) {
    return static_cast<std::size_t>(
        std::ceil(std::numbers::sqrt2 / std::numbers::e * k * std::pow(2.0, k / 2.0) - 1e-9));
}

namespace detail {

inline void extend_clique(const EdgeColoring& g, std::size_t k, int c, std::vector<int>& cur,
                          const std::vector<int>& cand, std::size_t from, std::vector<std::vector<int>>& out) {
    if (cur.size() == k) {
        auto s = cur;
        std::sort(s.begin(), s.end());
        out.push_back(std::move(s));
        return;
    }
    for (std::size_t i = from; i < cand.size(); ++i) {
        const int w = cand[i];
        bool ok = true;
        for (int u : cur)
            if (g.color(u, w) != c) {
                ok = false;
                break;
            }
        if (!ok) continue;
        cur.push_back(w);
        extend_clique(g, k, c, cur, cand, i + 1, out);
        cur.pop_back();
    }
}

}  // namespace detail

/// Every monochromatic k-clique (sorted vertex lists, sorted), by extending
/// monochromatic i-cliques one vertex at a time.
inline std::vector<std::vector<int>> find_mono_cliques(const EdgeColoring& g, std::size_t k) {
    require(k >= 2, ErrorKind::InvalidArgument, "k must be at least 2");
    std::vector<std::vector<int>> out;
    std::vector<int> all(g.n), cur;
    for (std::size_t v = 0; v < g.n; ++v) all[v] = static_cast<int>(v);
    for (int c = 0; c < 2; ++c)
        for (std::size_t v = 0; v < g.n; ++v) {
            cur = {static_cast<int>(v)};
            detail::extend_clique(g, k, c, cur, all, v + 1, out);
        }
    std::sort(out.begin(), out.end());
    return out;
}

/// Monochromatic k-cliques that contain the edge a-b.
inline std::vector<std::vector<int>> find_mono_cliques_with(const EdgeColoring& g, std::size_t k, int a, int b) {
    std::vector<std::vector<int>> out;
    const int c = g.color(a, b);
    std::vector<int> cand;
    for (std::size_t w = 0; w < g.n; ++w) {
        const int x = static_cast<int>(w);
        if (x != a && x != b && g.color(a, x) == c && g.color(b, x) == c) cand.push_back(x);
    }
    std::vector<int> cur{a, b};
    detail::extend_clique(g, k, c, cur, cand, 0, out);
    return out;
}

struct RamseyOptions {
    std::size_t n = 0;  // 0 picks ramsey_n(k)
    std::uint64_t cap = 10'000'000;
    bool audit = true;
};

struct RamseyResult {
    EdgeColoring coloring;
    std::size_t k = 0;
    std::uint64_t resamplings = 0;
    std::uint64_t pushes = 0;
};

namespace detail {

struct RamseySystem {
    using Event = std::vector<int>;
    EdgeColoring& g;
    std::size_t k;

    bool holds(const Event& e) const {
        const int c = g.color(e[0], e[1]);
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = i + 1; j < e.size(); ++j)
                if (g.color(e[i], e[j]) != c) return false;
        return true;
    }
    void resample(const Event& e, CounterRng& rng) {
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = i + 1; j < e.size(); ++j) g.set(e[i], e[j], static_cast<int>(rng.below(2)));
    }
    void scan(std::vector<Event>& out) const { out = find_mono_cliques(g, k); }
    void scan_near(const Event& e, std::vector<Event>& out) const {
        std::set<Event> seen;
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = i + 1; j < e.size(); ++j)
                for (auto& q : find_mono_cliques_with(g, k, e[i], e[j])) seen.insert(std::move(q));
        out.assign(seen.begin(), seen.end());
    }
};

}  // namespace detail

/// MT over the edges of K_n avoiding monochromatic K_k. Throws CapExceeded.
inline RamseyResult run_ramsey(std::size_t k, CounterRng& rng, const RamseyOptions& opt = {}) {
    require(k >= 3, ErrorKind::InvalidArgument, "k must be at least 3");
    RamseyResult res;
    res.k = k;
    const std::size_t n = opt.n ? opt.n : ramsey_n(static_cast<unsigned>(k));
    res.coloring = EdgeColoring(n);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
            res.coloring.set(static_cast<int>(u), static_cast<int>(v), static_cast<int>(rng.below(2)));
    detail::RamseySystem sys{res.coloring, k};
    const auto st = run_dfs(sys, rng, opt.cap, opt.audit, [](const auto&) {});
    require(st.status == RunStatus::Success, ErrorKind::CapExceeded, "ramsey resampling cap reached");
    res.resamplings = st.resamplings;
    res.pushes = st.pushes;
    return res;
}

inline RamseyResult run_ramsey(std::size_t k, std::uint64_t seed, const RamseyOptions& opt = {},
                               std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_ramsey(k, rng, opt);
}

}  // namespace lll
