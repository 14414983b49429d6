#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "lll/apps/bucket_list.hpp"
#include "lll/engine.hpp"
#include "lll/error.hpp"
#include "lll/rng.hpp"
#include "lll/swapping.hpp"

namespace lll {

/// n x n matrix of dense color ids 0..colors-1.
struct ColorMatrix {
    std::size_t n = 0;
    std::vector<int> cells;  // row-major
    int colors = 0;
    int delta = 0;  // most occurrences of one color

    int at(std::size_t x, std::size_t y) const { return cells[x * n + y]; }

    std::vector<std::vector<int>> rows() const {
        std::vector<std::vector<int>> r(n, std::vector<int>(n));
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) r[x][y] = at(x, y);
        return r;
    }

    /// Arbitrary integer ids are renumbered in order of first appearance.
    static ColorMatrix from_rows(const std::vector<std::vector<int>>& rows) {
        ColorMatrix m;
        m.n = rows.size();
        std::map<int, int> ids;
        std::vector<int> count;
        for (const auto& r : rows) {
            require(r.size() == m.n, ErrorKind::InvariantViolation, "matrix is not square");
            for (int c : r) {
                auto [it, fresh] = ids.emplace(c, static_cast<int>(ids.size()));
                if (fresh) count.push_back(0);
                m.cells.push_back(it->second);
                m.delta = std::max(m.delta, ++count[static_cast<std::size_t>(it->second)]);
            }
        }
        m.colors = static_cast<int>(ids.size());
        return m;
    }
};

/// Every color used exactly delta times (the last one possibly fewer), at
/// uniformly random cells.
inline ColorMatrix random_color_matrix(std::size_t n, std::size_t delta, std::uint64_t seed) {
    require(n >= 1 && delta >= 1, ErrorKind::InvalidArgument, "need n, delta >= 1");
    std::vector<int> cells(n * n);
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i / delta);
    CounterRng rng(seed, 0x6c61);
    for (std::size_t i = cells.size(); i > 1; --i) std::swap(cells[i - 1], cells[rng.below(i)]);
    std::vector<std::vector<int>> rows(n);
    for (std::size_t x = 0; x < n; ++x) rows[x].assign(cells.begin() + static_cast<long>(x * n), cells.begin() + static_cast<long>((x + 1) * n));
    return ColorMatrix::from_rows(rows);
}

/// h(c) = ((a c + b) mod P) mod n over P = 2^61 - 1.
struct PairwiseHash {
    static constexpr std::uint64_t P = (std::uint64_t(1) << 61) - 1;
    std::uint64_t a = 1, b = 0;
    std::size_t n = 1;

    static PairwiseHash draw(std::size_t n, CounterRng& rng) {
        PairwiseHash h;
        h.n = n;
        h.a = 1 + rng.below(P - 1);
        h.b = rng.below(P);
        return h;
    }

    std::size_t operator()(int c) const {
        const __uint128_t t = static_cast<__uint128_t>(a) * static_cast<std::uint64_t>(c) + b;
        std::uint64_t r = static_cast<std::uint64_t>(t & P) + static_cast<std::uint64_t>(t >> 61);
        while (r >= P) r -= P;
        return static_cast<std::size_t>(r % n);
    }
};

/// Cells (x, pi(x)) filed by the hash of their color.
class ColorBuckets {
public:
    ColorBuckets(const ColorMatrix& m, const PairwiseHash& h) : m_(&m), h_(h), list_(m.n) {}

    void insert(std::size_t x, const std::vector<int>& pi) { list_.insert(bucket(x, pi), static_cast<int>(x)); }
    void erase(std::size_t x, const std::vector<int>& pi) { list_.erase(bucket(x, pi), static_cast<int>(x)); }
    std::size_t bucket(std::size_t x, const std::vector<int>& pi) const {
        return h_(m_->at(x, static_cast<std::size_t>(pi[x])));
    }
    const std::vector<int>& rows_in(std::size_t b) const { return list_.items(b); }

    bool audit(const std::vector<int>& pi) const {
        if (list_.total() != m_->n) return false;
        for (std::size_t x = 0; x < m_->n; ++x)
            if (!list_.contains(bucket(x, pi), static_cast<int>(x))) return false;
        return true;
    }

private:
    const ColorMatrix* m_;
    PairwiseHash h_;
    IndexedBucketList list_;
};

/// Events pi(x) = y and pi(x2) = y2 with x < x2 and equal colors.
using CellPair = std::array<int, 4>;

inline double latin_threshold(std::size_t n) { return 27.0 * static_cast<double>(n) / 256.0; }

struct LatinOptions {
    std::uint64_t cap = 100'000'000;
    bool audit = false;   // bucket audit after every resampling
    double max_w = 64.0;  // partial mode: largest accepted coordinate weight
};

struct LatinResult {
    std::vector<int> pi;
    std::vector<char> active;  // all ones for full transversals
    std::size_t length = 0;    // active cells
    std::uint64_t resamplings = 0;
    std::uint64_t audits = 0;
    std::size_t survivors = 0;  // partial: true bad events left at the end
    double alpha = 0.0;         // partial: mu(B)
    double max_w = 0.0;         // partial: largest coordinate weight
    double bound = 0.0;         // expected-length bound for the mode
};

namespace detail {

inline std::uint64_t pair_key(const CellPair& e, std::size_t n) {
    std::uint64_t k = 0;
    for (int v : e) k = k * n + static_cast<std::uint64_t>(v);
    return k;
}

struct LatinSystem {
    using Event = CellPair;
    const ColorMatrix& m;
    PermutationState& st;
    ColorBuckets& buckets;
    bool audit;
    // Partial mode: per-event core probability; empty in full mode.
    std::function<double(const CellPair&)> q_of;
    CounterRng* mark_rng = nullptr;
    std::unordered_map<std::uint64_t, char> marks;
    std::vector<std::size_t> changed;
    std::uint64_t audits = 0;

    bool mark(const CellPair& e) {
        if (!q_of) return true;
        auto [it, fresh] = marks.emplace(pair_key(e, m.n), 0);
        if (fresh) it->second = mark_rng->bernoulli(q_of(e));
        return it->second;
    }

    bool atoms(const CellPair& e) const { return st.pi[static_cast<std::size_t>(e[0])] == e[1] && st.pi[static_cast<std::size_t>(e[2])] == e[3]; }

    bool holds(const CellPair& e) { return atoms(e) && mark(e); }

    CellPair make(std::size_t x, std::size_t x2) const {
        if (x2 < x) std::swap(x, x2);
        return {static_cast<int>(x), st.pi[x], static_cast<int>(x2), st.pi[x2]};
    }

    void resample(const CellPair& e, CounterRng& rng) {
        changed.clear();
        PermEvent pe;
        pe.pairs = {{e[0], e[1]}, {e[2], e[3]}};
        SwapLogEntry log;
        for (auto [x, y] : pe.pairs)
            if (st.pi[static_cast<std::size_t>(x)] == y) {
                const auto j = static_cast<std::size_t>(rng.below(st.n));
                const auto xs = static_cast<std::size_t>(x);
                buckets.erase(xs, st.pi);
                if (j != xs) buckets.erase(j, st.pi);
                std::swap(st.pi[xs], st.pi[j]);
                buckets.insert(xs, st.pi);
                if (j != xs) buckets.insert(j, st.pi);
                changed.push_back(xs);
                changed.push_back(j);
            }
        if (q_of) marks[pair_key(e, m.n)] = mark_rng->bernoulli(q_of(e));
        if (audit) {
            ++audits;
            require(buckets.audit(st.pi), ErrorKind::InvariantViolation, "color buckets out of date");
        }
    }

    void scan(std::vector<CellPair>& out) {
        std::unordered_map<int, std::vector<std::size_t>> by_color;
        for (std::size_t x = 0; x < m.n; ++x) by_color[m.at(x, static_cast<std::size_t>(st.pi[x]))].push_back(x);
        std::vector<CellPair> found;
        for (auto& [c, rows] : by_color)
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = i + 1; j < rows.size(); ++j) {
                    auto e = make(rows[i], rows[j]);
                    if (mark(e)) found.push_back(e);
                }
        std::sort(found.begin(), found.end());
        out.insert(out.end(), found.begin(), found.end());
    }

    /// Probes only the buckets of the rows the last swaps touched.
    void scan_near(const CellPair&, std::vector<CellPair>& out) {
        std::vector<CellPair> found;
        for (auto x : changed) {
            const int c = m.at(x, static_cast<std::size_t>(st.pi[x]));
            for (int x2 : buckets.rows_in(buckets.bucket(x, st.pi))) {
                if (static_cast<std::size_t>(x2) == x) continue;
                if (m.at(static_cast<std::size_t>(x2), static_cast<std::size_t>(st.pi[static_cast<std::size_t>(x2)])) != c) continue;
                auto e = make(x, static_cast<std::size_t>(x2));
                if (mark(e)) found.push_back(e);
            }
        }
        std::sort(found.begin(), found.end());
        found.erase(std::unique(found.begin(), found.end()), found.end());
        out.insert(out.end(), found.begin(), found.end());
    }
};

}  // namespace detail

/// Swapping MT for a full Latin transversal. Throws CriterionViolated when
/// delta > 27 n / 256 and CapExceeded at the cap.
inline LatinResult run_latin(const ColorMatrix& m, CounterRng& rng, const LatinOptions& opt = {}) {
    require(m.n >= 1, ErrorKind::InvalidArgument, "empty matrix");
    require(m.delta <= latin_threshold(m.n), ErrorKind::CriterionViolated,
            "delta " + std::to_string(m.delta) + " exceeds 27n/256");
    LatinResult res;
    PermutationState st(m.n);
    st.shuffle(rng);
    ColorBuckets buckets(m, PairwiseHash::draw(m.n, rng));
    for (std::size_t x = 0; x < m.n; ++x) buckets.insert(x, st.pi);
    detail::LatinSystem sys{m, st, buckets, opt.audit, {}, nullptr, {}, {}, 0};
    const auto ds = run_dfs(sys, rng, opt.cap, true, [](const auto&) {});
    require(ds.status == RunStatus::Success, ErrorKind::CapExceeded, "latin resampling cap reached");
    res.pi = st.pi;
    res.active.assign(m.n, 1);
    res.length = m.n;
    res.resamplings = ds.resamplings;
    res.audits = sys.audits;
    res.bound = static_cast<double>(m.n);
    return res;
}

inline LatinResult run_latin(const ColorMatrix& m, std::uint64_t seed, const LatinOptions& opt = {},
                             std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_latin(m, rng, opt);
}

/// For each color met more than once, keep the cell in the lowest row.
inline std::vector<char> deactivate_repeats(const ColorMatrix& m, const std::vector<int>& pi) {
    std::vector<char> active(m.n, 1);
    std::vector<char> seen(static_cast<std::size_t>(m.colors), 0);
    for (std::size_t x = 0; x < m.n; ++x) {
        const auto c = static_cast<std::size_t>(m.at(x, static_cast<std::size_t>(pi[x])));
        if (seen[c]) active[x] = 0;
        seen[c] = 1;
    }
    return active;
}

inline double stein_bound(std::size_t n, double beta) {
    return beta <= 0.0 ? static_cast<double>(n) : static_cast<double>(n) * (1.0 - std::exp(-beta)) / beta;
}

/// Uniform permutation with repeated colors thinned to one cell each.
inline LatinResult stein_baseline(const ColorMatrix& m, CounterRng& rng) {
    LatinResult res;
    PermutationState st(m.n);
    st.shuffle(rng);
    res.pi = st.pi;
    res.active = deactivate_repeats(m, res.pi);
    res.length = static_cast<std::size_t>(std::count(res.active.begin(), res.active.end(), 1));
    res.bound = stein_bound(m.n, static_cast<double>(m.delta) / static_cast<double>(m.n));
    return res;
}

inline LatinResult stein_baseline(const ColorMatrix& m, std::uint64_t seed, std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return stein_baseline(m, rng);
}

/// n min(1, 1/2 + cbrt(27 / (2048 beta))).
inline double partial_latin_bound(std::size_t n, double beta) {
    require(beta > 0.0, ErrorKind::InvalidArgument, "beta must be positive");
    return static_cast<double>(n) * std::min(1.0, 0.5 + std::cbrt(27.0 / (2048.0 * beta)));
}

/// mu(B) = (cbrt((n-1) / (4 (delta-1))) - 1) / (n (delta-1)).
inline double partial_latin_alpha(std::size_t n, int delta) {
    require(delta >= 2, ErrorKind::InvalidArgument, "delta must be at least 2");
    const double nn = static_cast<double>(n), d1 = delta - 1.0;
    return (std::cbrt((nn - 1.0) / (4.0 * d1)) - 1.0) / (nn * d1);
}

/// Number of bad events through each row and each column.
struct CoordinateCounts {
    std::vector<std::uint64_t> row, col;
    std::uint64_t events = 0;
};

inline CoordinateCounts coordinate_counts(const ColorMatrix& m) {
    const std::size_t n = m.n, C = static_cast<std::size_t>(m.colors);
    std::vector<std::uint64_t> total(C, 0);
    std::vector<std::uint64_t> in_row(n * C, 0), in_col(n * C, 0);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            const auto c = static_cast<std::size_t>(m.at(x, y));
            ++total[c];
            ++in_row[x * C + c];
            ++in_col[y * C + c];
        }
    CoordinateCounts cc;
    cc.row.assign(n, 0);
    cc.col.assign(n, 0);
    std::uint64_t twice = 0;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            const auto c = static_cast<std::size_t>(m.at(x, y));
            // Partners of the same color outside row x and column y.
            const std::uint64_t partners = total[c] - in_row[x * C + c] - in_col[y * C + c] + 1;
            cc.row[x] += partners;
            cc.col[y] += partners;
            twice += partners;
        }
    cc.events = twice / 2;
    return cc;
}

/// Truncated swapping MT with mu(B) = alpha; cells of surviving events are
/// thinned afterwards. Throws InvalidArgument unless 0 < beta <= 1/4.
inline LatinResult run_partial_latin(const ColorMatrix& m, CounterRng& rng, const LatinOptions& opt = {}) {
    const double beta = static_cast<double>(m.delta) / static_cast<double>(m.n);
    require(beta > 0.0 && beta <= 0.25, ErrorKind::InvalidArgument, "beta must lie in (0, 1/4]");
    LatinResult res;
    res.bound = partial_latin_bound(m.n, beta);
    PermutationState st(m.n);
    st.shuffle(rng);
    if (m.delta < 2) {
        res.pi = st.pi;
        res.active.assign(m.n, 1);
        res.length = m.n;
        return res;
    }
    res.alpha = partial_latin_alpha(m.n, m.delta);
    const auto cc = coordinate_counts(m);
    const double a = std::max(0.0, res.alpha);
    for (auto r : cc.row) res.max_w = std::max(res.max_w, 1.0 + static_cast<double>(r) * a);
    for (auto c : cc.col) res.max_w = std::max(res.max_w, 1.0 + static_cast<double>(c) * a);
    require(res.max_w <= opt.max_w, ErrorKind::InvariantViolation, "coordinate weight above the configured cap");
    const double p = 1.0 / (static_cast<double>(m.n) * static_cast<double>(m.n - 1));
    auto q_of = [&, a, p](const CellPair& e) {
        const double theta = p * (1.0 + cc.row[static_cast<std::size_t>(e[0])] * a) *
                             (1.0 + cc.col[static_cast<std::size_t>(e[1])] * a) *
                             (1.0 + cc.row[static_cast<std::size_t>(e[2])] * a) *
                             (1.0 + cc.col[static_cast<std::size_t>(e[3])] * a);
        return std::min(1.0, a / theta);
    };
    ColorBuckets buckets(m, PairwiseHash::draw(m.n, rng));
    for (std::size_t x = 0; x < m.n; ++x) buckets.insert(x, st.pi);
    CounterRng marks = rng.split(0x6d61726b);
    detail::LatinSystem sys{m, st, buckets, opt.audit, q_of, &marks, {}, {}, 0};
    const auto ds = run_dfs(sys, rng, opt.cap, true, [](const auto&) {});
    require(ds.status == RunStatus::Success, ErrorKind::CapExceeded, "latin resampling cap reached");
    res.pi = st.pi;
    res.active = deactivate_repeats(m, res.pi);
    res.length = static_cast<std::size_t>(std::count(res.active.begin(), res.active.end(), 1));
    res.survivors = 0;
    std::vector<std::uint64_t> per_color(static_cast<std::size_t>(m.colors), 0);
    for (std::size_t x = 0; x < m.n; ++x) ++per_color[static_cast<std::size_t>(m.at(x, static_cast<std::size_t>(st.pi[x])))];
    for (auto k : per_color) res.survivors += k * (k - 1) / 2;
    res.resamplings = ds.resamplings;
    res.audits = sys.audits;
    return res;
}

inline LatinResult run_partial_latin(const ColorMatrix& m, std::uint64_t seed, const LatinOptions& opt = {},
                                     std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_partial_latin(m, rng, opt);
}

}  // namespace lll
