#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lll/error.hpp"
#include "lll/events.hpp"
#include "lll/rng.hpp"
#include "lll/space.hpp"

namespace lll {

enum class SelectionRule { LowestIndex, StackLifo, Random };
enum class RunStatus { Success, CapExceeded };

inline const char* to_string(SelectionRule r) {
    switch (r) {
        case SelectionRule::LowestIndex: return "lowest-index";
        case SelectionRule::StackLifo: return "stack-lifo";
        case SelectionRule::Random: return "random";
    }
    return "?";
}

inline const char* to_string(RunStatus s) { return s == RunStatus::Success ? "success" : "cap-exceeded"; }

struct LogEntry {
    std::uint64_t step = 0;  // 1-based
    std::size_t event = 0;
    std::vector<int> values;  // new values of the event's scope, in scope order
};

struct ResampleLog {
    Configuration initial;
    std::vector<LogEntry> entries;
    std::vector<Configuration> snapshots;  // X^1..X^T when requested

    std::size_t size() const { return entries.size(); }
    std::vector<std::size_t> events() const {
        std::vector<std::size_t> out;
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back(e.event);
        return out;
    }
};

struct MtOptions {
    SelectionRule rule = SelectionRule::StackLifo;
    std::uint64_t cap = 0;  // 0 picks the default from the family's weights
    bool record_log = true;
    bool record_snapshots = false;
    bool audit = false;  // full rescan after DFS termination
};

struct MtResult {
    Configuration config;
    ResampleLog log;
    RunStatus status = RunStatus::Success;
    std::uint64_t resamplings = 0;
    std::vector<std::uint64_t> counts;  // per event

    bool ok() const { return status == RunStatus::Success; }
};

inline std::uint64_t default_cap(const BadEventFamily& family) {
    const double c = 1e4 * (1.0 + family.total_mu());
    return c >= 1e18 ? std::uint64_t(1e18) : static_cast<std::uint64_t>(c);
}

namespace detail {

inline void resample_scope(const ProductSpace& space, const BadEvent& e, Configuration& x, CounterRng& rng,
                           LogEntry* entry) {
    for (auto v : e.scope) x[v] = space.sample(v, rng);
    if (entry) {
        entry->values.resize(e.scope.size());
        for (std::size_t j = 0; j < e.scope.size(); ++j) entry->values[j] = x[e.scope[j]];
    }
}

struct Recorder {
    MtResult& res;
    const MtOptions& opt;
    const ProductSpace& space;
    const BadEventFamily& family;

    void resample(std::size_t id, Configuration& x, CounterRng& rng) {
        ++res.resamplings;
        ++res.counts[id];
        if (opt.record_log) {
            LogEntry entry;
            entry.step = res.resamplings;
            entry.event = id;
            resample_scope(space, family[id], x, rng, &entry);
            res.log.entries.push_back(std::move(entry));
            if (opt.record_snapshots) res.log.snapshots.push_back(x);
        } else {
            resample_scope(space, family[id], x, rng, nullptr);
        }
    }
};

}  // namespace detail

/// Naive-scan MT: every step looks at the whole family.
inline MtResult run_mt(const ProductSpace& space, const BadEventFamily& family, CounterRng& rng,
                       const MtOptions& opt = {}) {
    MtResult res;
    res.counts.assign(family.size(), 0);
    res.config = sample_initial(space, rng);
    if (opt.record_log) res.log.initial = res.config;
    const std::uint64_t cap = opt.cap ? opt.cap : default_cap(family);
    const std::size_t m = family.size();
    detail::Recorder rec{res, opt, space, family};
    Configuration& x = res.config;
    std::vector<int> buf;

    if (opt.rule == SelectionRule::StackLifo) {
        std::vector<char> truth(m, 0);
        std::vector<std::size_t> stack;
        for (std::size_t i = 0; i < m; ++i)
            if ((truth[i] = family[i].holds(x, buf))) stack.push_back(i);
        std::reverse(stack.begin(), stack.end());
        while (true) {
            while (!stack.empty() && !family[stack.back()].holds(x, buf)) stack.pop_back();
            if (stack.empty()) break;
            if (res.resamplings >= cap) {
                res.status = RunStatus::CapExceeded;
                return res;
            }
            const std::size_t b = stack.back();
            stack.pop_back();
            rec.resample(b, x, rng);
            std::vector<std::size_t> fresh;
            for (std::size_t i = 0; i < m; ++i) {
                const bool now = family[i].holds(x, buf);
                if (now && (!truth[i] || i == b)) fresh.push_back(i);
                truth[i] = now;
            }
            for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) stack.push_back(*it);
        }
        return res;
    }

    std::vector<std::size_t> live;
    while (true) {
        std::size_t pick = m;
        if (opt.rule == SelectionRule::LowestIndex) {
            for (std::size_t i = 0; i < m; ++i)
                if (family[i].holds(x, buf)) {
                    pick = i;
                    break;
                }
        } else {
            live.clear();
            for (std::size_t i = 0; i < m; ++i)
                if (family[i].holds(x, buf)) live.push_back(i);
            if (!live.empty()) pick = live[rng.below(live.size())];
        }
        if (pick == m) break;
        if (res.resamplings >= cap) {
            res.status = RunStatus::CapExceeded;
            return res;
        }
        rec.resample(pick, x, rng);
    }
    return res;
}

inline MtResult run_mt(const ProductSpace& space, const BadEventFamily& family, std::uint64_t seed,
                       const MtOptions& opt = {}, std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_mt(space, family, rng, opt);
}

struct DfsStats {
    RunStatus status = RunStatus::Success;
    std::uint64_t resamplings = 0;
    std::uint64_t pushes = 0;
};

/// Stack-driven MT over any system exposing
///   bool holds(const Event&)
///   void resample(const Event&, CounterRng&)
///   void scan(std::vector<Event>&)                 every true event
///   void scan_near(const Event&, std::vector<Event>&)  true events in N(e)
/// Events are re-checked when popped. With audit set, a final full scan that
/// finds anything means scan_near missed it.
template <class System, class OnResample>
DfsStats run_dfs(System& sys, CounterRng& rng, std::uint64_t cap, bool audit, OnResample&& on_resample) {
    using Event = typename System::Event;
    DfsStats st;
    std::vector<Event> stack, found;
    sys.scan(found);
    for (auto it = found.rbegin(); it != found.rend(); ++it) stack.push_back(*it);
    st.pushes = stack.size();
    while (!stack.empty()) {
        Event e = std::move(stack.back());
        stack.pop_back();
        if (!sys.holds(e)) continue;
        if (st.resamplings >= cap) {
            st.status = RunStatus::CapExceeded;
            return st;
        }
        sys.resample(e, rng);
        ++st.resamplings;
        on_resample(e);
        found.clear();
        sys.scan_near(e, found);
        st.pushes += found.size();
        for (auto it = found.rbegin(); it != found.rend(); ++it) stack.push_back(std::move(*it));
    }
    if (audit) {
        found.clear();
        sys.scan(found);
        require(found.empty(), ErrorKind::SearcherIncomplete,
                std::to_string(found.size()) + " true event(s) left after the stack emptied");
    }
    return st;
}

/// searcher(b, x, out) must append every true event of N(b) under x.
using NeighborSearcher = std::function<void(std::size_t, const Configuration&, std::vector<std::size_t>&)>;

namespace detail {

struct ExplicitSystem {
    using Event = std::size_t;
    const ProductSpace& space;
    const BadEventFamily& family;
    const DependencyGraph& graph;
    const NeighborSearcher& searcher;
    detail::Recorder& rec;
    Configuration& x;
    std::vector<int> buf;

    bool holds(std::size_t e) { return family[e].holds(x, buf); }
    void resample(std::size_t e, CounterRng& rng) { rec.resample(e, x, rng); }
    void scan(std::vector<std::size_t>& out) {
        for (std::size_t i = 0; i < family.size(); ++i)
            if (holds(i)) out.push_back(i);
    }
    void scan_near(std::size_t e, std::vector<std::size_t>& out) {
        if (searcher) {
            searcher(e, x, out);
            return;
        }
        for (auto j : graph.neighbors(e))
            if (holds(j)) out.push_back(j);
    }
};

}  // namespace detail

/// DFS-MT: after resampling B only N(B) is examined. An empty searcher walks
/// the dependency graph.
inline MtResult run_mt_dfs(const ProductSpace& space, const BadEventFamily& family, const DependencyGraph& graph,
                           CounterRng& rng, const MtOptions& opt = {}, const NeighborSearcher& searcher = {}) {
    MtResult res;
    res.counts.assign(family.size(), 0);
    res.config = sample_initial(space, rng);
    if (opt.record_log) res.log.initial = res.config;
    detail::Recorder rec{res, opt, space, family};
    detail::ExplicitSystem sys{space, family, graph, searcher, rec, res.config, {}};
    const auto st = run_dfs(sys, rng, opt.cap ? opt.cap : default_cap(family), opt.audit, [](std::size_t) {});
    res.status = st.status;
    return res;
}

inline MtResult run_mt_dfs(const ProductSpace& space, const BadEventFamily& family, std::uint64_t seed,
                           const MtOptions& opt = {}, std::uint64_t stream = 0) {
    DependencyGraph graph(family, space.size());
    CounterRng rng(seed, stream);
    return run_mt_dfs(space, family, graph, rng, opt);
}

/// Rebuilds X^0..X^T from the log and checks each B^t held just before its
/// resampling.
inline std::vector<Configuration> replay(const BadEventFamily& family, const ResampleLog& log) {
    std::vector<Configuration> states;
    states.reserve(log.entries.size() + 1);
    states.push_back(log.initial);
    Configuration x = log.initial;
    std::vector<int> buf;
    for (std::size_t t = 0; t < log.entries.size(); ++t) {
        const auto& entry = log.entries[t];
        require(entry.step == t + 1, ErrorKind::InvariantViolation, "log steps are not consecutive from 1");
        require(entry.event < family.size(), ErrorKind::InvariantViolation, "log names an unknown event");
        const auto& e = family[entry.event];
        require(e.holds(x, buf), ErrorKind::InvariantViolation,
                "event " + std::to_string(entry.event) + " was false before step " + std::to_string(t + 1));
        require(entry.values.size() == e.scope.size(), ErrorKind::InvariantViolation, "log entry has wrong arity");
        for (std::size_t j = 0; j < e.scope.size(); ++j) x[e.scope[j]] = entry.values[j];
        states.push_back(x);
    }
    return states;
}

/// Indices of events true under x.
inline std::vector<std::size_t> true_events(const BadEventFamily& family, const Configuration& x) {
    std::vector<std::size_t> out;
    std::vector<int> buf;
    for (std::size_t i = 0; i < family.size(); ++i)
        if (family[i].holds(x, buf)) out.push_back(i);
    return out;
}

}  // namespace lll
