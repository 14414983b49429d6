#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lll/engine.hpp"
#include "lll/error.hpp"
#include "lll/rng.hpp"

namespace lll {

struct PermutationState {
    std::size_t n = 0;
    std::vector<int> pi;

    explicit PermutationState(std::size_t n_ = 0) : n(n_), pi(n_) { std::iota(pi.begin(), pi.end(), 0); }

    bool is_bijection() const {
        if (pi.size() != n) return false;
        std::vector<char> seen(n, 0);
        for (int y : pi) {
            if (y < 0 || static_cast<std::size_t>(y) >= n || seen[static_cast<std::size_t>(y)]) return false;
            seen[static_cast<std::size_t>(y)] = 1;
        }
        return true;
    }

    void shuffle(CounterRng& rng) {
        for (std::size_t i = n; i > 1; --i) std::swap(pi[i - 1], pi[rng.below(i)]);
    }

    /// Position-x swap with a uniform partner, as used by resampling.
    std::size_t swap_random(std::size_t x, CounterRng& rng) {
        const auto j = static_cast<std::size_t>(rng.below(n));
        std::swap(pi[x], pi[j]);
        return j;
    }
};

/// Conjunction of atoms pi(x) = y. Atoms are kept sorted by x.
struct PermEvent {
    std::vector<std::pair<int, int>> pairs;
    double prob = 0.0;
    double mu = 0.0;

    bool holds(const std::vector<int>& pi) const {
        for (auto [x, y] : pairs)
            if (pi[static_cast<std::size_t>(x)] != y) return false;
        return true;
    }

    bool overlaps(const PermEvent& o) const {
        for (auto [x, y] : pairs)
            for (auto [x2, y2] : o.pairs)
                if (x == x2 || y == y2) return true;
        return false;
    }
};

/// Falling-factorial probability of |pairs| consistent atoms under a uniform
/// permutation of [n]; zero when atoms clash.
inline double perm_event_prob(std::size_t n, const std::vector<std::pair<int, int>>& pairs) {
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            const bool same_x = pairs[i].first == pairs[j].first;
            const bool same_y = pairs[i].second == pairs[j].second;
            if (same_x != same_y) return 0.0;
        }
    double p = 1.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) p /= static_cast<double>(n - i);
    return p;
}

struct SwapLogEntry {
    std::uint64_t step = 0;
    std::size_t event = 0;
    std::vector<std::pair<std::size_t, std::size_t>> swaps;
};

struct SwapResult {
    PermutationState state;
    std::vector<int> initial;
    std::vector<SwapLogEntry> log;
    RunStatus status = RunStatus::Success;
    std::uint64_t resamplings = 0;
    std::vector<std::uint64_t> counts;

    bool ok() const { return status == RunStatus::Success; }
};

struct SwapOptions {
    std::uint64_t cap = 0;
    bool record_log = true;
    bool check_bijection = true;
};

/// For each atom of the event, in scope order, that still holds, swap its
/// position with a uniformly random one.
inline void swap_resample(PermutationState& st, const PermEvent& e, CounterRng& rng, SwapLogEntry* entry) {
    for (auto [x, y] : e.pairs) {
        if (st.pi[static_cast<std::size_t>(x)] != y) continue;
        const auto j = st.swap_random(static_cast<std::size_t>(x), rng);
        if (entry) entry->swaps.emplace_back(static_cast<std::size_t>(x), j);
    }
}

/// Swapping MT on a uniformly random permutation of [n], resampling the
/// lowest-index true event each step.
inline SwapResult run_mt_swapping(std::size_t n, const std::vector<PermEvent>& events, CounterRng& rng,
                                  const SwapOptions& opt = {}) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        require(!events[i].pairs.empty(), ErrorKind::InvalidArgument, "permutation event with no atoms");
        for (auto [x, y] : events[i].pairs)
            require(x >= 0 && y >= 0 && static_cast<std::size_t>(x) < n && static_cast<std::size_t>(y) < n,
                    ErrorKind::InvalidArgument, "atom outside [n]");
    }
    SwapResult res;
    res.state = PermutationState(n);
    res.state.shuffle(rng);
    res.initial = res.state.pi;
    res.counts.assign(events.size(), 0);
    double total_mu = 0.0;
    for (const auto& e : events) total_mu += e.mu;
    const std::uint64_t cap = opt.cap ? opt.cap : static_cast<std::uint64_t>(1e4 * (1.0 + total_mu));
    while (true) {
        std::size_t pick = events.size();
        for (std::size_t i = 0; i < events.size(); ++i)
            if (events[i].holds(res.state.pi)) {
                pick = i;
                break;
            }
        if (pick == events.size()) break;
        if (res.resamplings >= cap) {
            res.status = RunStatus::CapExceeded;
            break;
        }
        ++res.resamplings;
        ++res.counts[pick];
        if (opt.record_log) {
            SwapLogEntry entry{res.resamplings, pick, {}};
            swap_resample(res.state, events[pick], rng, &entry);
            res.log.push_back(std::move(entry));
        } else {
            swap_resample(res.state, events[pick], rng, nullptr);
        }
        if (opt.check_bijection)
            require(res.state.is_bijection(), ErrorKind::InvariantViolation, "swap batch broke the bijection");
    }
    return res;
}

inline SwapResult run_mt_swapping(std::size_t n, const std::vector<PermEvent>& events, std::uint64_t seed,
                                  const SwapOptions& opt = {}, std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_mt_swapping(n, events, rng, opt);
}

}  // namespace lll
