#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lll/error.hpp"
#include "lll/space.hpp"

namespace lll {

/// Predicate over the scoped values, in scope order.
using EventPredicate = std::function<bool(std::span<const int>)>;

struct BadEvent {
    std::vector<std::size_t> scope;
    EventPredicate predicate;
    double prob = 0.0;
    double mu = 0.0;

    bool holds(const Configuration& x, std::vector<int>& buf) const {
        buf.resize(scope.size());
        for (std::size_t j = 0; j < scope.size(); ++j) buf[j] = x[scope[j]];
        return predicate(std::span<const int>(buf.data(), buf.size()));
    }

    bool holds(const Configuration& x) const {
        std::vector<int> buf;
        return holds(x, buf);
    }
};

/// Mass of pred on the product of the scope domains. Used to fill in prob
/// when no closed form is at hand.
inline double scope_probability(const ProductSpace& space, const std::vector<std::size_t>& scope,
                                const EventPredicate& pred, double limit = 1e6) {
    double states = 1.0;
    for (auto v : scope) states *= static_cast<double>(space.domain_size(v));
    require(states <= limit, ErrorKind::TooLarge, "scope has " + std::to_string(states) + " joint values");
    std::vector<int> vals(scope.size(), 0);
    double total = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t j = 0; j < scope.size(); ++j) w *= space.prob(scope[j], vals[j]);
        if (w > 0.0 && pred(std::span<const int>(vals.data(), vals.size()))) total += w;
        std::size_t j = 0;
        while (j < scope.size()) {
            if (++vals[j] < static_cast<int>(space.domain_size(scope[j]))) break;
            vals[j] = 0;
            ++j;
        }
        if (j == scope.size()) break;
    }
    return std::min(total, 1.0);
}

/// Indexed family of bad events. The dependency relation defaults to
/// variable sharing; applications with lopsided structure install their own.
class BadEventFamily {
public:
    using Relation = std::function<bool(std::size_t, std::size_t)>;

    BadEventFamily() = default;
    explicit BadEventFamily(std::vector<BadEvent> events) : events_(std::move(events)) { normalize(); }

    std::size_t add(BadEvent e) {
        events_.push_back(std::move(e));
        normalize_one(events_.size() - 1);
        return events_.size() - 1;
    }

    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    const BadEvent& operator[](std::size_t i) const { return events_[i]; }
    BadEvent& operator[](std::size_t i) { return events_[i]; }
    const std::vector<BadEvent>& events() const { return events_; }

    void set_relation(Relation rel) { relation_ = std::move(rel); }
    bool has_custom_relation() const { return static_cast<bool>(relation_); }
    const Relation& relation() const { return relation_; }

    std::vector<double> mu() const {
        std::vector<double> m(events_.size());
        for (std::size_t i = 0; i < events_.size(); ++i) m[i] = events_[i].mu;
        return m;
    }

    void set_mu(const std::vector<double>& m) {
        require(m.size() == events_.size(), ErrorKind::InvalidArgument, "mu vector has wrong length");
        for (std::size_t i = 0; i < m.size(); ++i) {
            require(m[i] >= 0.0, ErrorKind::InvalidArgument, "mu must be nonnegative");
            events_[i].mu = m[i];
        }
    }

    double total_mu() const {
        double s = 0.0;
        for (const auto& e : events_) s += e.mu;
        return s;
    }

    /// Checks scopes against the space and, where cheap enough, the stated
    /// probability against enumeration.
    void validate(const ProductSpace& space, double enum_limit = 1e6) const {
        for (std::size_t i = 0; i < events_.size(); ++i) {
            const auto& e = events_[i];
            for (auto v : e.scope)
                require(v < space.size(), ErrorKind::InvalidArgument,
                        "event " + std::to_string(i) + " references variable " + std::to_string(v));
            double states = 1.0;
            for (auto v : e.scope) states *= static_cast<double>(space.domain_size(v));
            if (states <= enum_limit) {
                const double exact = scope_probability(space, e.scope, e.predicate, enum_limit);
                require(std::abs(exact - e.prob) <= 1e-9, ErrorKind::InvariantViolation,
                        "event " + std::to_string(i) + " states prob " + std::to_string(e.prob) +
                            " but its predicate has mass " + std::to_string(exact));
            }
        }
    }

private:
    void normalize() {
        for (std::size_t i = 0; i < events_.size(); ++i) normalize_one(i);
    }

    void normalize_one(std::size_t i) {
        auto& e = events_[i];
        require(!e.scope.empty(), ErrorKind::InvalidArgument, "event " + std::to_string(i) + " has an empty scope");
        require(std::is_sorted(e.scope.begin(), e.scope.end()), ErrorKind::InvalidArgument,
                "event " + std::to_string(i) + " scope is not sorted");
        require(std::adjacent_find(e.scope.begin(), e.scope.end()) == e.scope.end(), ErrorKind::InvalidArgument,
                "event " + std::to_string(i) + " scope has duplicates");
        require(e.prob >= 0.0 && e.prob <= 1.0, ErrorKind::InvalidArgument,
                "event " + std::to_string(i) + " probability outside [0,1]");
        require(e.mu >= 0.0, ErrorKind::InvalidArgument, "event " + std::to_string(i) + " has negative mu");
        require(static_cast<bool>(e.predicate), ErrorKind::InvalidArgument,
                "event " + std::to_string(i) + " has no predicate");
    }

    std::vector<BadEvent> events_;
    Relation relation_;
};

/// Convenience constructor that fills prob by enumeration.
inline BadEvent make_event(const ProductSpace& space, std::vector<std::size_t> scope, EventPredicate pred,
                           double mu = 0.0) {
    BadEvent e;
    e.prob = scope_probability(space, scope, pred);
    e.scope = std::move(scope);
    e.predicate = std::move(pred);
    e.mu = mu;
    return e;
}

inline bool scopes_intersect(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) ++i;
        else ++j;
    }
    return false;
}

/// Inclusive neighbourhoods N(B). Built once per family.
class DependencyGraph {
public:
    DependencyGraph() = default;

    DependencyGraph(const BadEventFamily& family, std::size_t num_vars) {
        const std::size_t m = family.size();
        adj_.assign(m, {});
        var_events_.assign(num_vars, {});
        for (std::size_t i = 0; i < m; ++i)
            for (auto v : family[i].scope) {
                require(v < num_vars, ErrorKind::InvalidArgument, "scope variable out of range");
                var_events_[v].push_back(i);
            }
        if (family.has_custom_relation()) {
            const auto& rel = family.relation();
            for (std::size_t i = 0; i < m; ++i) {
                adj_[i].push_back(i);
                for (std::size_t j = i + 1; j < m; ++j)
                    if (rel(i, j)) {
                        adj_[i].push_back(j);
                        adj_[j].push_back(i);
                    }
            }
            for (auto& a : adj_) std::sort(a.begin(), a.end());
        } else {
            std::vector<std::size_t> mark(m, static_cast<std::size_t>(-1));
            for (std::size_t i = 0; i < m; ++i) {
                for (auto v : family[i].scope)
                    for (auto j : var_events_[v])
                        if (mark[j] != i) {
                            mark[j] = i;
                            adj_[i].push_back(j);
                        }
                std::sort(adj_[i].begin(), adj_[i].end());
            }
        }
    }

    std::size_t size() const { return adj_.size(); }
    const std::vector<std::size_t>& neighbors(std::size_t i) const { return adj_[i]; }
    const std::vector<std::size_t>& events_on(std::size_t var) const { return var_events_[var]; }

    bool dependent(std::size_t i, std::size_t j) const {
        return std::binary_search(adj_[i].begin(), adj_[i].end(), j);
    }

    /// Largest exclusive degree.
    std::size_t max_degree() const {
        std::size_t d = 0;
        for (const auto& a : adj_) d = std::max(d, a.size() - 1);
        return d;
    }

    /// N(E) for an event outside the family, under variable sharing.
    std::vector<std::size_t> neighborhood_of_scope(const std::vector<std::size_t>& scope) const {
        std::vector<std::size_t> out;
        for (auto v : scope)
            if (v < var_events_.size()) out.insert(out.end(), var_events_[v].begin(), var_events_[v].end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::vector<std::size_t>> var_events_;
};

}  // namespace lll
