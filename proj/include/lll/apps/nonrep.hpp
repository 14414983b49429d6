#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lll/apps/graph.hpp"
#include "lll/engine.hpp"
#include "lll/error.hpp"
#include "lll/rng.hpp"

namespace lll {

// ---------------------------------------------------------------- parameters

/// Smallest phi >= 0 with slack(phi) >= 0, by doubling then bisection.
/// Assumes feasibility is upward closed in phi.
template <class F>
double minimal_phi(F&& slack, double rel_tol = 1e-12) {
    if (slack(0.0) >= 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (!(slack(hi) >= 0.0)) {
        lo = hi;
        hi *= 2.0;
        require(hi < 1e30, ErrorKind::NoRoot, "no feasible phi below 1e30");
    }
    for (int it = 0; it < 400 && hi - lo > rel_tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (slack(mid) >= 0.0) hi = mid;
        else lo = mid;
    }
    return hi;
}

struct NonRepParams {
    double delta = 0;
    double phi = 0;       // solver-minimal real phi
    double phi_used = 0;  // phi that reproduces the integer C
    int C = 0;
    double alpha = 0;
    double beta = 0;
    double slack = 0;     // criterion slack at (C, alpha)
};

/// alpha C - 1 - alpha^2 C delta / (1 - alpha^2 C delta^2)^2 with
/// alpha = 1 / (sqrt(C) (delta + delta^(2/3))).
inline double nonrep_slack(double C, double delta) {
    const double s = delta + std::cbrt(delta * delta);
    const double alpha = 1.0 / (std::sqrt(C) * s);
    const double a2c = alpha * alpha * C;
    const double den = 1.0 - a2c * delta * delta;
    if (den <= 0.0) return -1.0;
    return alpha * C - 1.0 - a2c * delta / (den * den);
}

inline NonRepParams solve_nonrep(double delta) {
    require(delta >= 1.0, ErrorKind::InvalidArgument, "delta must be at least 1");
    NonRepParams p;
    p.delta = delta;
    const double d53 = std::pow(delta, 5.0 / 3.0);
    auto C_of = [&](double phi) { return delta * delta + phi * d53; };
    p.phi = minimal_phi([&](double phi) { return nonrep_slack(C_of(phi), delta); });
    p.C = static_cast<int>(std::ceil(C_of(p.phi) - 1e-9));
    while (nonrep_slack(p.C, delta) < 0.0) ++p.C;
    p.phi_used = (p.C - delta * delta) / d53;
    const double s = delta + std::cbrt(delta * delta);
    p.alpha = 1.0 / (std::sqrt(static_cast<double>(p.C)) * s);
    p.beta = 1.0 / (s * s);
    p.slack = nonrep_slack(p.C, delta);
    return p;
}

struct KThueParams {
    double delta = 0, k = 0, eps = 0;
    double phi = 0, phi_used = 0;
    int C = 0;
    double alpha = 0;
    double slack = 0;
    double ratio = 0;  // C delta^k alpha^k
};

/// Criterion for k-repetitions at (C, alpha):
/// C alpha - 1 - k alpha^k C delta^(k-1) / (1 - alpha^k C delta^k)^2.
inline double kthue_slack(double C, double alpha, double delta, double k) {
    const double ak = std::pow(alpha, k);
    const double den = 1.0 - ak * C * std::pow(delta, k);
    if (den <= 0.0) return -1.0;
    return C * alpha - 1.0 - k * ak * C * std::pow(delta, k - 1.0) / (den * den);
}

inline KThueParams solve_kthue(double delta, unsigned k, double eps) {
    require(delta >= 1.0 && k >= 2 && eps > 0.0, ErrorKind::InvalidArgument, "need delta >= 1, k >= 2, eps > 0");
    KThueParams p;
    p.delta = delta;
    p.k = k;
    p.eps = eps;
    const double b = (1.0 + eps) / (k - 1.0);
    const double base = std::pow(delta, 1.0 + b), step = std::pow(delta, 2.0 / 3.0 + b);
    auto C_of = [&](double phi) { return base + phi * step; };
    auto alpha_of = [&](double phi) { return 1.0 / (base + 0.5 * phi * step); };
    p.phi = minimal_phi([&](double phi) { return kthue_slack(C_of(phi), alpha_of(phi), delta, k); });
    p.C = static_cast<int>(std::ceil(C_of(p.phi) - 1e-9));
    for (;; ++p.C) {
        p.phi_used = (p.C - base) / step;
        p.alpha = alpha_of(p.phi_used);
        p.slack = kthue_slack(p.C, p.alpha, delta, k);
        if (p.slack >= 0.0) break;
        require(p.C < 1'000'000'000, ErrorKind::NoRoot, "no integer palette satisfies the criterion");
    }
    p.ratio = p.C * std::pow(delta * p.alpha, static_cast<double>(k));
    return p;
}

/// Smallest L with sum_{l >= L} n r^l <= 1/n, r = C delta^k alpha^k, capped
/// at floor(n / k).
inline std::size_t kthue_length(const KThueParams& p, std::size_t n) {
    const std::size_t top = n / static_cast<std::size_t>(p.k);
    if (p.ratio >= 1.0 || n < 2) return top;
    const double nn = static_cast<double>(n);
    for (std::size_t L = 1; L <= top; ++L)
        if (nn * std::pow(p.ratio, static_cast<double>(L)) / (1.0 - p.ratio) <= 1.0 / nn) return L;
    return top;
}

struct RhoParams {
    double delta = 0, rho = 0;
    double h = 0;  // binary entropy of rho in nats
    double phi = 0, phi_used = 0;
    int C = 0;
    double alpha = 0;
    double slack = 0;
};

inline double binary_entropy(double rho) {
    auto t = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
    return t(rho) + t(1.0 - rho);
}

/// C alpha - 1 - 2 alpha^(2rho) C^rho delta e^h / (1 - alpha^(2rho) C^rho delta^2 e^h)^2.
inline double rho_slack(double C, double alpha, double delta, double rho) {
    const double h = binary_entropy(rho);
    const double q = std::pow(alpha, 2.0 * rho) * std::pow(C, rho) * std::exp(h);
    const double den = 1.0 - q * delta * delta;
    if (den <= 0.0) return -1.0;
    return C * alpha - 1.0 - 2.0 * q * delta / (den * den);
}

inline RhoParams solve_rho(double delta, double rho) {
    require(delta >= 1.0 && rho > 0.0 && rho <= 1.0, ErrorKind::InvalidArgument, "need delta >= 1, rho in (0, 1]");
    RhoParams p;
    p.delta = delta;
    p.rho = rho;
    p.h = binary_entropy(rho);
    const double d116 = std::pow(delta, 11.0 / 6.0);
    const double lead = std::pow(1.0 - rho, 1.0 - 1.0 / rho) / rho;  // 0^0 = 1 at rho = 1
    auto C_of = [&](double phi) { return lead * std::pow(delta * delta + phi * d116, 1.0 / rho); };
    auto alpha_of = [&](double phi) {
        return std::exp(-p.h / rho) * std::pow(delta * delta + 0.5 * phi * d116, -1.0 / rho);
    };
    p.phi = minimal_phi([&](double phi) { return rho_slack(C_of(phi), alpha_of(phi), delta, rho); });
    p.C = static_cast<int>(std::ceil(C_of(p.phi) - 1e-9));
    for (;; ++p.C) {
        p.phi_used = (std::pow(p.C / lead, rho) - delta * delta) / d116;
        p.alpha = alpha_of(p.phi_used);
        p.slack = rho_slack(p.C, p.alpha, delta, rho);
        if (p.slack >= 0.0) break;
        require(p.C < 1'000'000'000, ErrorKind::NoRoot, "no integer palette satisfies the criterion");
    }
    return p;
}

// ----------------------------------------------------------------- searching

/// A simple path whose vertex colors carry the forbidden pattern. `l` is the
/// length of the repeated block. For rho-similar events `pairs` lists the
/// block positions i whose pair (i, i + l) is required to agree; otherwise it
/// is empty and every pair must agree.
struct PathEvent {
    std::vector<int> path;
    std::size_t l = 0;
    std::vector<int> pairs;

    auto key() const { return std::tie(path, pairs); }
    bool operator<(const PathEvent& o) const { return key() < o.key(); }
    bool operator==(const PathEvent& o) const { return key() == o.key(); }

    /// Vertices whose colors decide the event.
    std::vector<int> vars() const {
        if (pairs.empty()) return path;
        std::vector<int> v;
        for (int i : pairs) {
            v.push_back(path[static_cast<std::size_t>(i)]);
            v.push_back(path[static_cast<std::size_t>(i) + l]);
        }
        return v;
    }

    bool holds(const std::vector<int>& color) const {
        auto c = [&](std::size_t i) { return color[static_cast<std::size_t>(path[i])]; };
        if (pairs.empty()) {
            for (std::size_t i = l; i < path.size(); ++i)
                if (c(i) != c(i - l)) return false;
            return true;
        }
        for (int i : pairs)
            if (c(static_cast<std::size_t>(i)) != c(static_cast<std::size_t>(i) + l)) return false;
        return true;
    }
};

/// Orients the path so the smaller endpoint comes first.
inline std::vector<int> canonical_path(std::vector<int> p) {
    if (p.size() > 1 && p.back() < p.front()) std::reverse(p.begin(), p.end());
    return p;
}

struct SearchOptions {
    std::size_t max_len = 0;          // largest block length l; 0 means unbounded
    std::size_t story_cap = 1'000'000;
};

namespace detail {

/// Grows k aligned segments with equal colors. Full mode starts every
/// segment at its first position and grows forward; anchored mode pins the
/// anchor in one segment and grows forward, then backward, so every story is
/// visited exactly once.
class RepSearch {
public:
    RepSearch(const Graph& g, const std::vector<int>& color, const ColorIndex& idx, std::size_t k,
              const SearchOptions& opt)
        : g_(g), color_(color), idx_(idx), k_(k), used_(g.n, 0), fwd_(k), bwd_(k) {
        max_len_ = g.n / k;
        if (opt.max_len) max_len_ = std::min(max_len_, opt.max_len);
        cap_ = opt.story_cap;
        by_color_.clear();
        for (std::size_t v = 0; v < g.n; ++v) by_color_[color[v]].push_back(static_cast<int>(v));
    }

    void full() {
        if (max_len_ == 0) return;
        for (const auto& [c, vs] : by_color_) {
            if (vs.size() < k_) continue;
            start_tuples(vs, 0, -1, false);
        }
    }

    void anchored(int v) {
        if (max_len_ == 0) return;
        const auto& vs = by_color_[color_[static_cast<std::size_t>(v)]];
        if (vs.size() < k_) return;
        for (std::size_t j = 0; 2 * j + 1 <= k_; ++j) start_tuples(vs, 0, static_cast<int>(j), true, v);
    }

    std::set<std::vector<int>> found;
    std::size_t stories = 0;

private:
    int front(std::size_t j) const { return bwd_[j].empty() ? fwd_[j].front() : bwd_[j].back(); }
    int back(std::size_t j) const { return fwd_[j].back(); }
    std::size_t len() const { return fwd_[0].size() + bwd_[0].size(); }

    void place(std::size_t j, int v, bool forward) {
        (forward ? fwd_[j] : bwd_[j]).push_back(v);
        used_[static_cast<std::size_t>(v)] = 1;
    }
    void unplace(std::size_t j, bool forward) {
        auto& s = forward ? fwd_[j] : bwd_[j];
        used_[static_cast<std::size_t>(s.back())] = 0;
        s.pop_back();
    }

    void start_tuples(const std::vector<int>& vs, std::size_t j, int anchor_seg, bool backward, int anchor = -1) {
        if (j == k_) {
            visit(true, backward);
            return;
        }
        if (static_cast<int>(j) == anchor_seg) {
            place(j, anchor, true);
            start_tuples(vs, j + 1, anchor_seg, backward, anchor);
            unplace(j, true);
            return;
        }
        for (int v : vs) {
            if (used_[static_cast<std::size_t>(v)]) continue;
            if (anchor >= 0 && v == anchor) continue;
            place(j, v, true);
            start_tuples(vs, j + 1, anchor_seg, backward, anchor);
            unplace(j, true);
        }
    }

    void visit(bool forward_open, bool backward) {
        require(++stories <= cap_, ErrorKind::StoryExplosion, "story cap exceeded");
        bool complete = true;
        for (std::size_t j = 0; j + 1 < k_ && complete; ++j) complete = g_.has_edge(back(j), front(j + 1));
        if (complete) emit();
        if (len() >= max_len_) return;
        if (forward_open) extend(0, -1, true, backward);
        if (backward) extend(0, -1, false, backward);
    }

    void extend(std::size_t j, int c, bool forward, bool backward) {
        if (j == k_) {
            visit(forward, backward);
            return;
        }
        const int end = forward ? back(j) : front(j);
        if (j == 0) {
            for (int u : g_.adj[static_cast<std::size_t>(end)]) {
                if (used_[static_cast<std::size_t>(u)]) continue;
                place(0, u, forward);
                extend(1, color_[static_cast<std::size_t>(u)], forward, backward);
                unplace(0, forward);
            }
            return;
        }
        auto [lo, hi] = idx_.with_color(end, c);
        for (auto it = lo; it != hi; ++it) {
            const int u = it->second;
            if (used_[static_cast<std::size_t>(u)]) continue;
            place(j, u, forward);
            extend(j + 1, c, forward, backward);
            unplace(j, forward);
        }
    }

    void emit() {
        std::vector<int> p;
        for (std::size_t j = 0; j < k_; ++j) {
            p.insert(p.end(), bwd_[j].rbegin(), bwd_[j].rend());
            p.insert(p.end(), fwd_[j].begin(), fwd_[j].end());
        }
        found.insert(canonical_path(std::move(p)));
    }

    const Graph& g_;
    const std::vector<int>& color_;
    const ColorIndex& idx_;
    std::size_t k_;
    std::size_t max_len_ = 0;
    std::size_t cap_ = 0;
    std::vector<char> used_;
    std::vector<std::vector<int>> fwd_, bwd_;
    std::map<int, std::vector<int>> by_color_;
};

}  // namespace detail

/// Every simple path colored x x ... x (k blocks), canonical and sorted. With
/// an anchor, only paths through it.
inline std::vector<std::vector<int>> find_repeats(const Graph& g, const std::vector<int>& color,
                                                  const ColorIndex& idx, std::size_t k = 2, int anchor = -1,
                                                  const SearchOptions& opt = {}) {
    require(k >= 2, ErrorKind::InvalidArgument, "k must be at least 2");
    require(color.size() == g.n, ErrorKind::InvalidArgument, "coloring has wrong length");
    detail::RepSearch s(g, color, idx, k, opt);
    if (anchor < 0) s.full();
    else s.anchored(anchor);
    return {s.found.begin(), s.found.end()};
}

inline std::vector<std::vector<int>> find_repeats(const Graph& g, const std::vector<int>& color, std::size_t k = 2,
                                                  int anchor = -1, const SearchOptions& opt = {}) {
    ColorIndex idx(g, color);
    return find_repeats(g, color, idx, k, anchor, opt);
}

inline std::size_t ceil_frac(double rho, std::size_t t) {
    return static_cast<std::size_t>(std::ceil(rho * static_cast<double>(t) - 1e-9));
}

/// Canonical event for a rho-similar path: oriented, with the first
/// ceil(rho l) agreeing block positions.
inline PathEvent similar_event(std::vector<int> path, const std::vector<int>& color, double rho) {
    PathEvent e;
    e.path = canonical_path(std::move(path));
    e.l = e.path.size() / 2;
    const std::size_t need = ceil_frac(rho, e.l);
    for (std::size_t i = 0; i < e.l && e.pairs.size() < need; ++i)
        if (color[static_cast<std::size_t>(e.path[i])] == color[static_cast<std::size_t>(e.path[i + e.l])])
            e.pairs.push_back(static_cast<int>(i));
    return e;
}

struct SimilarOptions {
    std::size_t max_len = 0;
    std::size_t story_cap = 1'000'000;
    int only_offset = -1;  // restrict the scan to one starting block position (testing)
};

namespace detail {

/// Offset scan: block positions are filled in the order a, a+1, ..., a-1
/// (mod l), each step placing the pair (i, i+l). A story survives stage t
/// only with at least ceil(rho t) agreeing pairs.
class SimilarSearch {
public:
    SimilarSearch(const Graph& g, const std::vector<int>& color, double rho, const SimilarOptions& opt)
        : g_(g), color_(color), rho_(rho), opt_(opt), used_(g.n, 0) {}

    void run() {
        std::size_t top = g_.n / 2;
        if (opt_.max_len) top = std::min(top, opt_.max_len);
        for (l_ = 1; l_ <= top; ++l_) {
            pos_.assign(2 * l_, -1);
            for (std::size_t a = 0; a < l_; ++a) {
                if (opt_.only_offset >= 0 && a != static_cast<std::size_t>(opt_.only_offset)) continue;
                a_ = a;
                step(0, 0);
            }
        }
    }

    std::set<std::vector<int>> found;
    std::size_t stories = 0;

private:
    void candidates(std::size_t p, std::vector<int>& out) const {
        out.clear();
        const int left = p > 0 ? pos_[p - 1] : -1;
        const int right = p + 1 < pos_.size() ? pos_[p + 1] : -1;
        auto ok = [&](int u) {
            if (used_[static_cast<std::size_t>(u)]) return false;
            if (left >= 0 && !g_.has_edge(left, u)) return false;
            if (right >= 0 && !g_.has_edge(right, u)) return false;
            return true;
        };
        if (left >= 0) {
            for (int u : g_.adj[static_cast<std::size_t>(left)])
                if (ok(u)) out.push_back(u);
        } else if (right >= 0) {
            for (int u : g_.adj[static_cast<std::size_t>(right)])
                if (ok(u)) out.push_back(u);
        } else {
            for (std::size_t u = 0; u < g_.n; ++u)
                if (ok(static_cast<int>(u))) out.push_back(static_cast<int>(u));
        }
    }

    void step(std::size_t t, std::size_t agree) {
        require(++stories <= opt_.story_cap, ErrorKind::StoryExplosion, "story cap exceeded");
        if (t == l_) {
            found.insert(canonical_path(pos_));
            return;
        }
        const std::size_t i = (a_ + t) % l_;
        std::vector<int> c1, c2;
        candidates(i, c1);
        for (int u : c1) {
            pos_[i] = u;
            used_[static_cast<std::size_t>(u)] = 1;
            candidates(i + l_, c2);
            for (int w : c2) {
                const std::size_t now = agree + (color_[static_cast<std::size_t>(u)] == color_[static_cast<std::size_t>(w)]);
                if (now < ceil_frac(rho_, t + 1)) continue;
                pos_[i + l_] = w;
                used_[static_cast<std::size_t>(w)] = 1;
                step(t + 1, now);
                used_[static_cast<std::size_t>(w)] = 0;
                pos_[i + l_] = -1;
            }
            used_[static_cast<std::size_t>(u)] = 0;
            pos_[i] = -1;
        }
    }

    const Graph& g_;
    const std::vector<int>& color_;
    double rho_;
    SimilarOptions opt_;
    std::vector<char> used_;
    std::vector<int> pos_;
    std::size_t l_ = 0, a_ = 0;
};

}  // namespace detail

/// Every simple path x y with |x| = |y| = l agreeing in >= ceil(rho l)
/// positions, canonical and sorted.
inline std::vector<std::vector<int>> find_similar(const Graph& g, const std::vector<int>& color, double rho,
                                                  const SimilarOptions& opt = {}) {
    require(rho > 0.0 && rho <= 1.0, ErrorKind::InvalidArgument, "rho must lie in (0, 1]");
    require(color.size() == g.n, ErrorKind::InvalidArgument, "coloring has wrong length");
    detail::SimilarSearch s(g, color, rho, opt);
    s.run();
    return {s.found.begin(), s.found.end()};
}

struct DoublingResult {
    std::vector<std::vector<int>> repeats;  // canonical, sorted
    std::vector<std::size_t> level_sizes;   // live stories per level
    std::map<std::vector<int>, int> level_of;  // level at which each repetition's story appeared
};

/// Level s holds every pair of equal-colored, disjoint paths (v_0..v_{j-1}),
/// (w_0..w_{j-1}) with j <= 2^s. Level s+1 adds the stories of length
/// j in (2^s, 2^(s+1)] by joining a story of length floor(j/2) to one of
/// length ceil(j/2).
inline DoublingResult find_repeats_doubling(const Graph& g, const std::vector<int>& color,
                                            std::size_t story_cap = 1'000'000) {
    require(color.size() == g.n, ErrorKind::InvalidArgument, "coloring has wrong length");
    using Story = std::pair<std::vector<int>, std::vector<int>>;
    DoublingResult res;
    std::vector<std::vector<Story>> by_len(1);  // by_len[j] = stories of length j
    by_len.push_back({});
    for (std::size_t v = 0; v < g.n; ++v)
        for (std::size_t w = 0; w < g.n; ++w)
            if (v != w && color[v] == color[w]) by_len[1].push_back({{static_cast<int>(v)}, {static_cast<int>(w)}});
    std::size_t live = by_len[1].size();
    require(live <= story_cap, ErrorKind::StoryExplosion, "story cap exceeded at level 0");
    res.level_sizes.push_back(live);
    const std::size_t top = g.n / 2;

    auto collect = [&](std::size_t j, int level) {
        for (const auto& [v, w] : by_len[j])
            if (g.has_edge(v.back(), w.front())) {
                std::vector<int> p = v;
                p.insert(p.end(), w.begin(), w.end());
                p = canonical_path(std::move(p));
                res.level_of.emplace(p, level);
            }
    };
    if (top >= 1) collect(1, 0);

    std::vector<char> mark(g.n, 0);
    for (int level = 0; (std::size_t(1) << level) < top; ++level) {
        const std::size_t lo = (std::size_t(1) << level) + 1;
        const std::size_t hi = std::min(top, std::size_t(1) << (level + 1));
        by_len.resize(hi + 1);
        // Index the second halves by their first pair.
        for (std::size_t j = lo; j <= hi; ++j) {
            const std::size_t a = j / 2, b = j - a;
            std::map<std::pair<int, int>, std::vector<std::size_t>> heads;
            for (std::size_t i = 0; i < by_len[b].size(); ++i)
                heads[{by_len[b][i].first.front(), by_len[b][i].second.front()}].push_back(i);
            for (const auto& [va, wa] : by_len[a]) {
                for (int x : va) mark[static_cast<std::size_t>(x)] = 1;
                for (int x : wa) mark[static_cast<std::size_t>(x)] = 1;
                for (int x : g.adj[static_cast<std::size_t>(va.back())])
                    for (int y : g.adj[static_cast<std::size_t>(wa.back())]) {
                        auto it = heads.find({x, y});
                        if (it == heads.end()) continue;
                        for (auto bi : it->second) {
                            const auto& [vb, wb] = by_len[b][bi];
                            bool ok = true;
                            for (int z : vb) ok = ok && !mark[static_cast<std::size_t>(z)];
                            for (int z : wb) ok = ok && !mark[static_cast<std::size_t>(z)];
                            if (!ok) continue;
                            Story s{va, wa};
                            s.first.insert(s.first.end(), vb.begin(), vb.end());
                            s.second.insert(s.second.end(), wb.begin(), wb.end());
                            by_len[j].push_back(std::move(s));
                            require(++live <= story_cap, ErrorKind::StoryExplosion, "story cap exceeded");
                        }
                    }
                for (int x : va) mark[static_cast<std::size_t>(x)] = 0;
                for (int x : wa) mark[static_cast<std::size_t>(x)] = 0;
            }
            collect(j, level + 1);
        }
        res.level_sizes.push_back(live);
    }
    for (const auto& [p, lv] : res.level_of) res.repeats.push_back(p);
    return res;
}

// ------------------------------------------------------------------ running

struct NonRepOptions {
    int C = 0;                    // 0 uses the solver's palette
    bool allow_trivial = true;    // distinct colors when C >= n
    std::uint64_t cap = 10'000'000;
    bool audit_index = false;     // rebuild-compare the color index after every resampling
    SearchOptions search{};
};

struct NonRepResult {
    std::vector<int> coloring;
    int C = 0;
    bool trivial = false;
    std::uint64_t resamplings = 0;
    std::uint64_t pushes = 0;
    std::size_t checked_length = 0;  // k-Thue: largest block length searched
};

namespace detail {

/// DFS system over path events. k-repetitions use the anchored searcher from
/// each recolored vertex; rho-similar events rescan and keep paths through a
/// recolored vertex.
struct NonRepSystem {
    using Event = PathEvent;
    const Graph& g;
    std::vector<int>& color;
    ColorIndex& idx;
    int C;
    std::size_t k;      // block count for exact repetitions
    double rho;         // < 1 switches to rho-similar events
    SearchOptions search;
    bool audit_index;

    bool similar() const { return rho < 1.0; }

    bool holds(const Event& e) const { return e.holds(color); }

    void resample(const Event& e, CounterRng& rng) {
        for (int v : e.vars()) {
            const int old = color[static_cast<std::size_t>(v)];
            color[static_cast<std::size_t>(v)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(C)));
            idx.recolor(v, old);
        }
        if (audit_index) require(idx.audit(), ErrorKind::InvariantViolation, "color index out of date");
    }

    void to_events(const std::vector<std::vector<int>>& paths, std::vector<Event>& out) const {
        for (const auto& p : paths) {
            if (similar()) {
                out.push_back(similar_event(p, color, rho));
            } else {
                Event e;
                e.path = p;
                e.l = p.size() / k;
                out.push_back(std::move(e));
            }
        }
    }

    std::vector<std::vector<int>> all_paths() const {
        if (similar()) return find_similar(g, color, rho, {search.max_len, search.story_cap, -1});
        return find_repeats(g, color, idx, k, -1, search);
    }

    void scan(std::vector<Event>& out) const { to_events(all_paths(), out); }

    void scan_near(const Event& e, std::vector<Event>& out) const {
        auto vs = e.vars();
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        std::set<std::vector<int>> paths;
        if (similar()) {
            for (auto& p : all_paths())
                for (int v : p)
                    if (std::binary_search(vs.begin(), vs.end(), v)) {
                        paths.insert(std::move(p));
                        break;
                    }
        } else {
            for (int v : vs)
                for (auto& p : find_repeats(g, color, idx, k, v, search)) paths.insert(std::move(p));
        }
        to_events({paths.begin(), paths.end()}, out);
    }
};

inline NonRepResult run_path_mt(const Graph& g, int C, std::size_t k, double rho, CounterRng& rng,
                                const NonRepOptions& opt, SearchOptions search) {
    require(C >= 1, ErrorKind::InvalidArgument, "palette must be nonempty");
    NonRepResult res;
    res.C = C;
    if (opt.allow_trivial && static_cast<std::size_t>(C) >= g.n) {
        res.trivial = true;
        res.coloring.resize(g.n);
        for (std::size_t v = 0; v < g.n; ++v) res.coloring[v] = static_cast<int>(v);
        return res;
    }
    res.coloring.resize(g.n);
    for (auto& c : res.coloring) c = static_cast<int>(rng.below(static_cast<std::uint64_t>(C)));
    ColorIndex idx(g, res.coloring);
    NonRepSystem sys{g, res.coloring, idx, C, k, rho, search, opt.audit_index};
    const auto st = run_dfs(sys, rng, opt.cap, true, [](const auto&) {});
    require(st.status == RunStatus::Success, ErrorKind::CapExceeded, "resampling cap reached");
    res.resamplings = st.resamplings;
    res.pushes = st.pushes;
    return res;
}

}  // namespace detail

/// Colors g with no repetitively colored path (Las Vegas: the final full
/// search must come back empty).
inline NonRepResult run_nonrep(const Graph& g, CounterRng& rng, const NonRepOptions& opt = {}) {
    const int C = opt.C ? opt.C : solve_nonrep(std::max<double>(1.0, static_cast<double>(g.max_degree()))).C;
    return detail::run_path_mt(g, C, 2, 1.0, rng, opt, opt.search);
}

inline NonRepResult run_nonrep(const Graph& g, std::uint64_t seed, const NonRepOptions& opt = {},
                               std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_nonrep(g, rng, opt);
}

/// Avoids k-repetitions whose block length is at most the computed L; longer
/// ones are not searched.
inline NonRepResult run_kthue(const Graph& g, unsigned k, double eps, CounterRng& rng, const NonRepOptions& opt = {}) {
    const auto p = solve_kthue(std::max<double>(1.0, static_cast<double>(g.max_degree())), k, eps);
    const int C = opt.C ? opt.C : p.C;
    SearchOptions search = opt.search;
    const std::size_t L = kthue_length(p, g.n);
    search.max_len = search.max_len ? std::min(search.max_len, L) : L;
    auto res = detail::run_path_mt(g, C, k, 1.0, rng, opt, search);
    res.checked_length = search.max_len;
    return res;
}

inline NonRepResult run_kthue(const Graph& g, unsigned k, double eps, std::uint64_t seed,
                              const NonRepOptions& opt = {}, std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_kthue(g, k, eps, rng, opt);
}

inline NonRepResult run_rho_similar(const Graph& g, double rho, CounterRng& rng, const NonRepOptions& opt = {}) {
    require(rho > 0.0 && rho <= 1.0, ErrorKind::InvalidArgument, "rho must lie in (0, 1]");
    const int C = opt.C ? opt.C : solve_rho(std::max<double>(1.0, static_cast<double>(g.max_degree())), rho).C;
    return detail::run_path_mt(g, C, 2, rho, rng, opt, opt.search);
}

inline NonRepResult run_rho_similar(const Graph& g, double rho, std::uint64_t seed, const NonRepOptions& opt = {},
                                    std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_rho_similar(g, rho, rng, opt);
}

}  // namespace lll
