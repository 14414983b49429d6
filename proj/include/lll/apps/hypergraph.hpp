#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "lll/apps/bucket_list.hpp"
#include "lll/engine.hpp"
#include "lll/error.hpp"
#include "lll/rng.hpp"

namespace lll {

/// k-uniform hypergraph; edges are sorted vertex lists.
struct HypInstance {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::vector<int>> edges;
    std::vector<std::vector<int>> incident;  // edge ids per vertex

    HypInstance() = default;
    HypInstance(std::size_t n_, std::size_t k_) : n(n_), k(k_), incident(n_) {}

    int add_edge(std::vector<int> e) {
        std::sort(e.begin(), e.end());
        require(e.size() == k, ErrorKind::InvariantViolation, "edge size differs from k");
        require(std::adjacent_find(e.begin(), e.end()) == e.end(), ErrorKind::InvariantViolation,
                "edge repeats a vertex");
        for (int v : e) require(v >= 0 && static_cast<std::size_t>(v) < n, ErrorKind::InvariantViolation,
                                "vertex id out of range");
        const int id = static_cast<int>(edges.size());
        for (int v : e) incident[static_cast<std::size_t>(v)].push_back(id);
        edges.push_back(std::move(e));
        return id;
    }

    std::size_t m() const { return edges.size(); }

    /// |N(f)| including f.
    std::size_t neighborhood_size(int f) const {
        std::vector<int> ids;
        for (int v : edges[static_cast<std::size_t>(f)])
            for (int g : incident[static_cast<std::size_t>(v)]) ids.push_back(g);
        std::sort(ids.begin(), ids.end());
        return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
    }

    std::size_t max_neighborhood() const {
        std::size_t L = 0;
        for (std::size_t f = 0; f < m(); ++f) L = std::max(L, neighborhood_size(static_cast<int>(f)));
        return L;
    }
};

inline std::size_t intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t i = 0, j = 0, s = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else ++s, ++i, ++j;
    }
    return s;
}

/// Random k-uniform hypergraph with m edges and vertex degree <= max_deg.
inline HypInstance random_hypergraph(std::size_t n, std::size_t m, std::size_t k, std::size_t max_deg,
                                     std::uint64_t seed) {
    require(k >= 2 && n >= k, ErrorKind::InvalidArgument, "need n >= k >= 2");
    require(m * k <= n * max_deg, ErrorKind::InvalidArgument, "degree budget too small for m edges");
    HypInstance h(n, k);
    CounterRng rng(seed, 0x6879);
    std::vector<int> open(n);
    for (std::size_t v = 0; v < n; ++v) open[v] = static_cast<int>(v);
    std::set<std::vector<int>> seen;
    std::size_t tries = 0;
    while (h.m() < m) {
        require(++tries < 100 * m + 1000 && open.size() >= k, ErrorKind::InvalidArgument,
                "could not place all edges under the degree bound");
        std::vector<int> e;
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + rng.below(open.size() - i);
            std::swap(open[i], open[j]);
            e.push_back(open[i]);
        }
        std::sort(e.begin(), e.end());
        if (!seen.insert(e).second) continue;
        h.add_edge(e);
        std::erase_if(open, [&](int v) { return h.incident[static_cast<std::size_t>(v)].size() >= max_deg; });
    }
    return h;
}

struct HypParams {
    double k = 0, L = 0;
    double R = 0;
    double p1 = 0;
    double p2 = 0;        // exact integral
    double p2_bound = 0;  // 2^(1-2k) R
    double mu1 = 0, mu2 = 0;
    double t_bound = 0;   // exp(2 L sqrt(e) p1 + 4 L^2 e p2)
    double L_max = 0;     // 0.17 sqrt(k / ln k) 2^k
    bool L_ok = false;
    bool criterion_ok = false;  // t <= sqrt(e)
};

/// Composite Simpson's rule with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels = 2000) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

inline HypParams hyp_params(std::size_t k, std::size_t L) {
    require(k >= 2, ErrorKind::InvalidArgument, "k must be at least 2");
    HypParams p;
    p.k = static_cast<double>(k);
    p.L = static_cast<double>(L);
    p.R = std::log(p.k) / (2.0 * p.k);
    p.p1 = std::ldexp(std::pow(1.0 - p.R, p.k), -static_cast<int>(k));
    const double scale = std::ldexp(1.0, 1 - 2 * static_cast<int>(k));
    p.p2 = scale * simpson([&](double x) { return std::pow(1.0 - x * x, p.k - 1.0); }, 0.0, p.R);
    p.p2_bound = scale * p.R;
    const double e = std::numbers::e;
    p.mu1 = std::sqrt(e) * p.p1;
    p.mu2 = e * p.p2;
    p.t_bound = std::exp(2.0 * p.L * std::sqrt(e) * p.p1 + 4.0 * p.L * p.L * e * p.p2);
    p.L_max = 0.17 * std::sqrt(p.k / std::log(p.k)) * std::ldexp(1.0, static_cast<int>(k));
    p.L_ok = p.L <= p.L_max;
    p.criterion_ok = p.t_bound <= std::sqrt(e);
    return p;
}

/// B^c(f) when g < 0, else B^c(f, g) with f and g meeting in exactly one vertex.
struct HypEvent {
    int f = 0;
    int g = -1;
    int c = 0;

    auto key() const { return std::tie(f, g, c); }
    bool operator<(const HypEvent& o) const { return key() < o.key(); }
    bool operator==(const HypEvent& o) const { return key() == o.key(); }
};

/// Colors and ranks with the per-vertex lists of monochromatic edges.
class HypState {
public:
    HypState(const HypInstance& h, double R) : h_(&h), R_(R), color(h.n), rank(h.n), mono_(h.n), is_mono_(h.m()) {}

    void randomize(CounterRng& rng) {
        for (std::size_t v = 0; v < h_->n; ++v) draw(v, rng);
        rebuild();
    }

    void draw(std::size_t v, CounterRng& rng) {
        color[v] = static_cast<int>(rng.below(2));
        rank[v] = rng.uniform();
    }

    bool edge_mono(int f) const {
        const auto& e = h_->edges[static_cast<std::size_t>(f)];
        const int c = color[static_cast<std::size_t>(e[0])];
        for (int v : e)
            if (color[static_cast<std::size_t>(v)] != c) return false;
        return true;
    }

    int lowest(int f) const {
        const auto& e = h_->edges[static_cast<std::size_t>(f)];
        int best = e[0];
        for (int v : e)
            if (rank[static_cast<std::size_t>(v)] < rank[static_cast<std::size_t>(best)]) best = v;
        return best;
    }

    void refresh(int f) {
        const bool now = edge_mono(f);
        if (now == static_cast<bool>(is_mono_[static_cast<std::size_t>(f)])) return;
        is_mono_[static_cast<std::size_t>(f)] = now;
        for (int v : h_->edges[static_cast<std::size_t>(f)]) {
            if (now) mono_.insert(static_cast<std::size_t>(v), f);
            else mono_.erase(static_cast<std::size_t>(v), f);
        }
    }

    void rebuild() {
        mono_ = IndexedBucketList(h_->n);
        std::fill(is_mono_.begin(), is_mono_.end(), 0);
        for (std::size_t f = 0; f < h_->m(); ++f) refresh(static_cast<int>(f));
    }

    const std::vector<int>& mono_at(int v) const { return mono_.items(static_cast<std::size_t>(v)); }

    /// The lists hold exactly the monochromatic edges of each vertex.
    bool audit() const {
        std::size_t expect = 0;
        for (std::size_t f = 0; f < h_->m(); ++f) {
            const bool mono = edge_mono(static_cast<int>(f));
            if (mono != static_cast<bool>(is_mono_[f])) return false;
            for (int v : h_->edges[f])
                if (mono_.contains(static_cast<std::size_t>(v), static_cast<int>(f)) != mono) return false;
            if (mono) expect += h_->k;
        }
        return mono_.total() == expect;
    }

    bool holds(const HypEvent& e) const {
        const auto& f = h_->edges[static_cast<std::size_t>(e.f)];
        for (int v : f)
            if (color[static_cast<std::size_t>(v)] != e.c) return false;
        if (e.g < 0) {
            for (int v : f)
                if (rank[static_cast<std::size_t>(v)] <= R_) return false;
            return true;
        }
        const int v = lowest(e.f);
        const double rv = rank[static_cast<std::size_t>(v)];
        if (rv > R_) return false;
        const auto& g = h_->edges[static_cast<std::size_t>(e.g)];
        if (!std::binary_search(g.begin(), g.end(), v)) return false;
        for (int u : g) {
            if (u == v) continue;
            if (color[static_cast<std::size_t>(u)] == e.c && rank[static_cast<std::size_t>(u)] >= rv) return false;
        }
        return true;
    }

    /// True events B(f) and B(f, g) for a monochromatic f.
    void events_from(int f, std::vector<HypEvent>& out) const {
        const int c = color[static_cast<std::size_t>(h_->edges[static_cast<std::size_t>(f)][0])];
        if (holds({f, -1, c})) {
            out.push_back({f, -1, c});
            return;
        }
        const int v = lowest(f);
        if (rank[static_cast<std::size_t>(v)] > R_) return;
        for (int g : h_->incident[static_cast<std::size_t>(v)]) {
            if (g == f) continue;
            if (intersection_size(h_->edges[static_cast<std::size_t>(f)], h_->edges[static_cast<std::size_t>(g)]) != 1)
                continue;
            if (holds({f, g, c})) out.push_back({f, g, c});
        }
    }

private:
    const HypInstance* h_;
    double R_;

public:
    std::vector<int> color;
    std::vector<double> rank;

private:
    IndexedBucketList mono_;
    std::vector<char> is_mono_;
};

/// Sequential flip pass over vertices in rank order, on a copy of the colors.
inline std::vector<int> flip_pass(const HypInstance& h, const std::vector<int>& color, const std::vector<double>& rank) {
    std::vector<int> out = color;
    std::vector<int> low(h.m());
    for (std::size_t f = 0; f < h.m(); ++f) {
        const auto& e = h.edges[f];
        low[f] = *std::min_element(e.begin(), e.end(), [&](int a, int b) {
            return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)];
        });
    }
    std::vector<int> order(h.n);
    for (std::size_t v = 0; v < h.n; ++v) order[v] = static_cast<int>(v);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)];
    });
    for (int v : order)
        for (int f : h.incident[static_cast<std::size_t>(v)]) {
            if (low[static_cast<std::size_t>(f)] != v) continue;
            const auto& e = h.edges[static_cast<std::size_t>(f)];
            bool mono = true;
            for (int u : e)
                if (out[static_cast<std::size_t>(u)] != out[static_cast<std::size_t>(e[0])]) mono = false;
            if (mono) {
                out[static_cast<std::size_t>(v)] ^= 1;
                break;
            }
        }
    return out;
}

/// First monochromatic edge, or -1.
inline int find_mono_edge(const HypInstance& h, const std::vector<int>& color) {
    for (std::size_t f = 0; f < h.m(); ++f) {
        const auto& e = h.edges[f];
        bool mono = true;
        for (int u : e)
            if (color[static_cast<std::size_t>(u)] != color[static_cast<std::size_t>(e[0])]) mono = false;
        if (mono) return static_cast<int>(f);
    }
    return -1;
}

struct HypOptions {
    std::uint64_t cap = 10'000'000;
    bool audit = false;         // rescan the lists after every resampling
    bool shortcut = true;       // random coloring + flip with restarts when m is small
    std::uint64_t restart_cap = 100'000;
};

struct HypResult {
    std::vector<int> coloring;   // after the flip pass
    std::vector<int> original;   // MT output colors
    std::vector<double> rank;
    HypParams params;
    bool used_shortcut = false;
    std::uint64_t resamplings = 0;
    std::uint64_t restarts = 0;
    std::uint64_t audits = 0;
};

namespace detail {

struct HypSystem {
    using Event = HypEvent;
    const HypInstance& h;
    HypState& st;
    bool audit;
    std::uint64_t audits = 0;

    bool holds(const Event& e) const { return st.holds(e); }

    void resample(const Event& e, CounterRng& rng) {
        std::vector<int> vs = h.edges[static_cast<std::size_t>(e.f)];
        if (e.g >= 0) vs.insert(vs.end(), h.edges[static_cast<std::size_t>(e.g)].begin(),
                                h.edges[static_cast<std::size_t>(e.g)].end());
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        for (int v : vs) st.draw(static_cast<std::size_t>(v), rng);
        for (int v : vs)
            for (int f : h.incident[static_cast<std::size_t>(v)]) st.refresh(f);
        if (audit) {
            ++audits;
            require(st.audit(), ErrorKind::InvariantViolation, "monochromatic edge lists out of date");
        }
    }

    void scan(std::vector<Event>& out) const {
        for (std::size_t f = 0; f < h.m(); ++f)
            if (st.edge_mono(static_cast<int>(f))) st.events_from(static_cast<int>(f), out);
    }

    void scan_near(const Event& e, std::vector<Event>& out) const {
        std::vector<int> vs = h.edges[static_cast<std::size_t>(e.f)];
        if (e.g >= 0) vs.insert(vs.end(), h.edges[static_cast<std::size_t>(e.g)].begin(),
                                h.edges[static_cast<std::size_t>(e.g)].end());
        std::vector<Event> found;
        std::vector<int> touched;
        for (int v : vs)
            for (int f : h.incident[static_cast<std::size_t>(v)]) touched.push_back(f);
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        // f touches a resampled vertex.
        for (int f : touched)
            if (st.edge_mono(f)) st.events_from(f, found);
        // g touches one, f does not: f is monochromatic through some vertex of g.
        for (int g : touched)
            for (int v : h.edges[static_cast<std::size_t>(g)])
                for (int f : st.mono_at(v)) {
                    if (f == g || st.lowest(f) != v) continue;
                    const int c = st.color[static_cast<std::size_t>(v)];
                    if (intersection_size(h.edges[static_cast<std::size_t>(f)], h.edges[static_cast<std::size_t>(g)]) == 1 &&
                        st.holds({f, g, c}))
                        found.push_back({f, g, c});
                }
        std::sort(found.begin(), found.end());
        found.erase(std::unique(found.begin(), found.end()), found.end());
        out.insert(out.end(), found.begin(), found.end());
    }
};

}  // namespace detail

/// Shortcut threshold sqrt(k / ln k) 2^k on the number of edges.
inline double hyp_small_m(std::size_t k) {
    const double kk = static_cast<double>(k);
    return std::sqrt(kk / std::log(kk)) * std::ldexp(1.0, static_cast<int>(k));
}

inline HypResult run_hyp2col(const HypInstance& h, CounterRng& rng, const HypOptions& opt = {}) {
    require(h.k >= 2, ErrorKind::InvalidArgument, "k must be at least 2");
    HypResult res;
    res.params = hyp_params(h.k, h.max_neighborhood());
    HypState st(h, res.params.R);
    if (opt.shortcut && static_cast<double>(h.m()) < hyp_small_m(h.k)) {
        res.used_shortcut = true;
        while (true) {
            for (std::size_t v = 0; v < h.n; ++v) st.draw(v, rng);
            auto out = flip_pass(h, st.color, st.rank);
            if (find_mono_edge(h, out) < 0) {
                res.original = st.color;
                res.rank = st.rank;
                res.coloring = std::move(out);
                return res;
            }
            require(++res.restarts < opt.restart_cap, ErrorKind::CapExceeded, "too many restarts");
        }
    }
    st.randomize(rng);
    detail::HypSystem sys{h, st, opt.audit};
    const auto ds = run_dfs(sys, rng, opt.cap, true, [](const auto&) {});
    require(ds.status == RunStatus::Success, ErrorKind::CapExceeded, "hypergraph resampling cap reached");
    res.resamplings = ds.resamplings;
    res.audits = sys.audits;
    res.original = st.color;
    res.rank = st.rank;
    res.coloring = flip_pass(h, st.color, st.rank);
    require(find_mono_edge(h, res.coloring) < 0, ErrorKind::InvariantViolation,
            "flip pass left a monochromatic edge although no bad event holds");
    return res;
}

inline HypResult run_hyp2col(const HypInstance& h, std::uint64_t seed, const HypOptions& opt = {},
                             std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_hyp2col(h, rng, opt);
}

}  // namespace lll
