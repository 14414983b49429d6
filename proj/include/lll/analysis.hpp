#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "lll/error.hpp"
#include "lll/events.hpp"

namespace lll {

inline constexpr std::size_t kDefaultExactLimit = 25;
inline constexpr double kCriterionTol = 1e-12;

struct SubsetSum {
    double value = 1.0;
    bool exact = true;
};

namespace detail {

// Z(S) = Z(S - v) + mu(v) Z(S - N[v]) over bitmasks of at most 64 events.
class IndependencePolynomial {
public:
    IndependencePolynomial(std::vector<double> w, std::vector<std::uint64_t> closed_nbhd)
        : w_(std::move(w)), nb_(std::move(closed_nbhd)) {}

    double eval(std::uint64_t mask) {
        if (mask == 0) return 1.0;
        if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
        const int v = std::countr_zero(mask);
        const std::uint64_t without = mask & ~(std::uint64_t(1) << v);
        double z = eval(without);
        if (w_[static_cast<std::size_t>(v)] != 0.0) z += w_[static_cast<std::size_t>(v)] * eval(mask & ~nb_[static_cast<std::size_t>(v)]);
        memo_.emplace(mask, z);
        return z;
    }

private:
    std::vector<double> w_;
    std::vector<std::uint64_t> nb_;
    std::unordered_map<std::uint64_t, double> memo_;
};

}  // namespace detail

/// Sum over independent I within `subset` of prod_{B in I} mu(B). Above
/// exact_limit the product bound prod (1 + mu) is returned and flagged.
inline SubsetSum independent_subset_sum(const std::vector<std::size_t>& subset, const std::vector<double>& mu,
                                        const DependencyGraph& graph,
                                        std::size_t exact_limit = kDefaultExactLimit) {
    SubsetSum out;
    if (subset.size() > exact_limit || subset.size() > 64) {
        out.exact = false;
        for (auto i : subset) out.value *= 1.0 + mu[i];
        return out;
    }
    const std::size_t s = subset.size();
    std::vector<double> w(s);
    std::vector<std::uint64_t> nb(s, 0);
    for (std::size_t a = 0; a < s; ++a) {
        w[a] = mu[subset[a]];
        for (std::size_t b = 0; b < s; ++b)
            if (a == b || graph.dependent(subset[a], subset[b])) nb[a] |= std::uint64_t(1) << b;
    }
    detail::IndependencePolynomial poly(std::move(w), std::move(nb));
    out.value = poly.eval(s == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << s) - 1);
    return out;
}

struct ThetaValue {
    double value = 0.0;
    bool exact = true;
};

/// theta(E) = P(E) * sum over independent I within N(E).
inline ThetaValue theta(double prob, const std::vector<std::size_t>& neighborhood, const std::vector<double>& mu,
                        const DependencyGraph& graph, std::size_t exact_limit = kDefaultExactLimit) {
    const auto s = independent_subset_sum(neighborhood, mu, graph, exact_limit);
    return {prob * s.value, s.exact};
}

/// theta of an event outside the family, neighbours found by variable sharing.
inline ThetaValue theta_of_scope(double prob, const std::vector<std::size_t>& scope, const std::vector<double>& mu,
                                 const DependencyGraph& graph, std::size_t exact_limit = kDefaultExactLimit) {
    return theta(prob, graph.neighborhood_of_scope(scope), mu, graph, exact_limit);
}

/// prod over variables v of B of (1 + sum of mu over events on v). An
/// independent set within N(B) meets each such variable at most once, so this
/// bounds the subset sum whenever dependence is plain variable sharing.
inline double variable_clique_bound(const std::vector<std::size_t>& scope, const std::vector<double>& mu,
                                    const DependencyGraph& graph) {
    double out = 1.0;
    for (auto v : scope) {
        double s = 0.0;
        for (auto j : graph.events_on(v)) s += mu[j];
        out *= 1.0 + s;
    }
    return out;
}

inline ThetaValue theta_of_event(std::size_t i, const BadEventFamily& family, const std::vector<double>& mu,
                                 const DependencyGraph& graph, std::size_t exact_limit = kDefaultExactLimit) {
    auto th = theta(family[i].prob, graph.neighbors(i), mu, graph, exact_limit);
    if (!th.exact && !family.has_custom_relation())
        th.value = std::min(th.value, family[i].prob * variable_clique_bound(family[i].scope, mu, graph));
    return th;
}

struct CriterionReport {
    bool satisfied = true;
    double slack = std::numeric_limits<double>::infinity();
    std::size_t worst_event = 0;
    double epsilon_slack = std::numeric_limits<double>::infinity();
    bool exact = true;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> theta;
};

/// mu(B) >= theta(B) for every B.
inline CriterionReport check_pegden(const BadEventFamily& family, const DependencyGraph& graph,
                                    const std::vector<double>& mu, std::size_t exact_limit = kDefaultExactLimit) {
    require(mu.size() == family.size(), ErrorKind::InvalidArgument, "mu vector has wrong length");
    for (double m : mu) require(m >= 0.0, ErrorKind::InvalidArgument, "mu must be nonnegative");
    CriterionReport rep;
    rep.theta.resize(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto th = theta_of_event(i, family, mu, graph, exact_limit);
        rep.theta[i] = th.value;
        rep.exact = rep.exact && th.exact;
        const double s = mu[i] - th.value;
        if (s < rep.slack) {
            rep.slack = s;
            rep.worst_event = i;
        }
        if (th.value > 0.0) rep.epsilon_slack = std::min(rep.epsilon_slack, mu[i] / th.value - 1.0);
    }
    rep.satisfied = rep.slack >= -kCriterionTol;
    return rep;
}

inline CriterionReport check_pegden(const BadEventFamily& family, const DependencyGraph& graph,
                                    std::size_t exact_limit = kDefaultExactLimit) {
    return check_pegden(family, graph, family.mu(), exact_limit);
}

/// e * p * d <= 1, with alpha = e * p * d reported.
inline CriterionReport check_symmetric(double p, double d) {
    require(p >= 0.0 && p <= 1.0, ErrorKind::InvalidArgument, "p must lie in [0,1]");
    require(d >= 1.0, ErrorKind::InvalidArgument, "d must be at least 1");
    CriterionReport rep;
    rep.alpha = std::numbers::e * p * d;
    rep.slack = 1.0 - rep.alpha;
    rep.epsilon_slack = rep.alpha > 0.0 ? 1.0 / rep.alpha - 1.0 : std::numeric_limits<double>::infinity();
    rep.satisfied = rep.alpha <= 1.0 + kCriterionTol;
    return rep;
}

struct DecompositionTerm {
    double cost = 0.0;
    double prob = 0.0;
    std::vector<std::size_t> neighborhood;
};

struct EventDecomposition {
    std::vector<DecompositionTerm> terms;
};

struct RuntimeBound {
    double T = 0.0;
    double bound = 0.0;
    bool exact = true;
};

/// (1 + sum mu) * sum_i c_i theta(A_i). Requires the criterion.
inline RuntimeBound bound_runtime(const EventDecomposition& decomp, const BadEventFamily& family,
                                  const DependencyGraph& graph, std::size_t exact_limit = kDefaultExactLimit) {
    const auto mu = family.mu();
    const auto crit = check_pegden(family, graph, mu, exact_limit);
    require(crit.satisfied, ErrorKind::CriterionViolated,
            "mu(B) >= theta(B) fails at event " + std::to_string(crit.worst_event));
    RuntimeBound rb;
    rb.exact = crit.exact;
    for (const auto& term : decomp.terms) {
        require(term.cost >= 0.0 && std::isfinite(term.cost), ErrorKind::InvalidArgument,
                "decomposition costs must be finite and nonnegative");
        const auto th = theta(term.prob, term.neighborhood, mu, graph, exact_limit);
        rb.T += term.cost * th.value;
        rb.exact = rb.exact && th.exact;
    }
    rb.bound = (1.0 + family.total_mu()) * rb.T;
    return rb;
}

/// sum_B mu(B) T_B, for searchers run once per resampling of B (initial
/// scan excluded).
inline double bound_runtime_per_event(const std::vector<double>& per_event_T, const std::vector<double>& mu) {
    require(per_event_T.size() == mu.size(), ErrorKind::InvalidArgument, "length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * per_event_T[i];
    return s;
}

inline double binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

struct RamseyBound {
    double p = 0.0;
    double mu = 0.0;
    double degree = 0.0;   // exclusive |N(B)| - 1 for a k-clique
    bool symmetric_ok = false;
    double T = 0.0;
    double bound = 0.0;
};

/// Clique-extension decomposition: one term per i-clique I, 2 <= i <= k, with
/// cost n*C(i,2), P = 2^{1-C(i,2)} and |N(I)| = sum_{j>=2} C(i,j) C(n-i,k-j).
/// The symmetric criterion is reported, not enforced: at small k it fails for
/// the classical n even though MT terminates quickly in practice.
inline RamseyBound ramsey_runtime_bound(std::uint64_t n, std::uint64_t k) {
    require(k >= 3 && n >= k, ErrorKind::InvalidArgument, "need k >= 3 and n >= k");
    RamseyBound rb;
    rb.p = std::pow(2.0, 1.0 - binomial(k, 2));
    rb.mu = std::numbers::e * rb.p;
    const auto nbhd = [&](std::uint64_t i) {
        double s = 0.0;
        for (std::uint64_t j = 2; j <= std::min(i, k); ++j) s += binomial(i, j) * binomial(n - i, k - j);
        return s;
    };
    rb.degree = nbhd(k) - 1.0;
    rb.symmetric_ok = check_symmetric(rb.p, std::max(1.0, rb.degree)).satisfied;
    for (std::uint64_t i = 2; i <= k; ++i) {
        const double th = std::pow(2.0, 1.0 - binomial(i, 2)) * std::pow(1.0 + rb.mu, nbhd(i));
        rb.T += binomial(n, i) * static_cast<double>(n) * binomial(i, 2) * th;
    }
    rb.bound = (1.0 + binomial(n, k) * rb.mu) * rb.T;
    return rb;
}

/// Least mu with mu = theta(mu), by iteration from zero. Returns false when
/// the iteration diverges, which means no weighting satisfies the criterion
/// on this neighbourhood structure.
inline bool solve_minimal_mu(const BadEventFamily& family, const DependencyGraph& graph, std::vector<double>& mu,
                             std::size_t max_iter = 100000, double tol = 1e-15,
                             std::size_t exact_limit = kDefaultExactLimit) {
    mu.assign(family.size(), 0.0);
    std::vector<double> next(family.size());
    for (std::size_t it = 0; it < max_iter; ++it) {
        double change = 0.0, largest = 0.0;
        for (std::size_t i = 0; i < family.size(); ++i) {
            next[i] = theta_of_event(i, family, mu, graph, exact_limit).value;
            change = std::max(change, std::abs(next[i] - mu[i]));
            largest = std::max(largest, next[i]);
        }
        mu.swap(next);
        if (!std::isfinite(largest) || largest > 1e6) return false;
        if (change <= tol * std::max(1.0, largest)) return true;
    }
    return false;
}

}  // namespace lll
