#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "lll/analysis.hpp"
#include "lll/engine.hpp"
#include "lll/error.hpp"
#include "lll/events.hpp"
#include "lll/rng.hpp"
#include "lll/space.hpp"

namespace lll {

/// Per-event core probabilities q(B) and the theta values they came from.
struct CoreMarks {
    std::vector<double> q;
    std::vector<double> theta;
};

inline CoreMarks core_marks(const BadEventFamily& family, const DependencyGraph& graph, const std::vector<double>& mu,
                            std::size_t exact_limit = kDefaultExactLimit) {
    require(mu.size() == family.size(), ErrorKind::InvalidArgument, "mu vector has wrong length");
    CoreMarks cm;
    cm.q.resize(family.size());
    cm.theta.resize(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
        require(mu[i] >= 0.0, ErrorKind::InvalidArgument, "mu must be nonnegative");
        cm.theta[i] = theta_of_event(i, family, mu, graph, exact_limit).value;
        cm.q[i] = cm.theta[i] > 0.0 ? std::min(1.0, mu[i] / cm.theta[i]) : 1.0;
    }
    return cm;
}

/// Space with one extra Bernoulli(q) variable per event, and the family of
/// events B and Y(B)=1. The mark of event i is variable n + i.
struct AugmentedFamily {
    ProductSpace space;
    BadEventFamily family;
    std::size_t base_vars = 0;
};

inline AugmentedFamily augment(const ProductSpace& space, const BadEventFamily& family, const std::vector<double>& q) {
    AugmentedFamily a;
    a.space = space;
    a.base_vars = space.size();
    a.family = family;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const std::size_t y = a.space.add_variable({1.0 - q[i], q[i]});
        auto& e = a.family[i];
        e.scope.push_back(y);
        e.prob = family[i].prob * q[i];
        e.predicate = [inner = family[i].predicate](std::span<const int> v) {
            return v.back() == 1 && inner(v.first(v.size() - 1));
        };
    }
    return a;
}

struct TruncatedOptions {
    SelectionRule rule = SelectionRule::StackLifo;
    std::uint64_t cap = 0;
    bool record_log = true;
    std::size_t exact_limit = kDefaultExactLimit;
};

struct TruncatedResult {
    Configuration config;      // original variables only
    Configuration augmented;   // original variables followed by the marks
    ResampleLog log;           // over the augmented family
    RunStatus status = RunStatus::Success;
    std::uint64_t resamplings = 0;
    std::vector<std::uint64_t> counts;
    std::vector<std::size_t> survivors;
    CoreMarks marks;

    bool ok() const { return status == RunStatus::Success; }
};

/// Truncated MT: resample B only while its mark Y(B) is 1. The weights need
/// not satisfy the criterion; events left true are reported as survivors.
inline TruncatedResult run_truncated(const ProductSpace& space, const BadEventFamily& family,
                                     const std::vector<double>& mu, CounterRng& rng,
                                     const TruncatedOptions& opt = {}) {
    DependencyGraph g(family, space.size());
    TruncatedResult res;
    res.marks = core_marks(family, g, mu, opt.exact_limit);
    const auto aug = augment(space, family, res.marks.q);
    const auto check = check_pegden(aug.family, g, mu, opt.exact_limit);
    require(check.satisfied, ErrorKind::CriterionViolated,
            "augmented family fails the criterion at event " + std::to_string(check.worst_event) +
                " (slack " + std::to_string(check.slack) + ")");

    MtOptions mo;
    mo.rule = opt.rule;
    mo.cap = opt.cap;
    mo.record_log = opt.record_log;
    auto r = run_mt(aug.space, aug.family, rng, mo);
    res.augmented = r.config;
    res.config.assign(r.config.begin(), r.config.begin() + static_cast<std::ptrdiff_t>(aug.base_vars));
    res.log = std::move(r.log);
    res.status = r.status;
    res.resamplings = r.resamplings;
    res.counts = std::move(r.counts);
    if (res.status == RunStatus::Success) res.survivors = true_events(family, res.config);
    return res;
}

inline TruncatedResult run_truncated(const ProductSpace& space, const BadEventFamily& family,
                                     const std::vector<double>& mu, std::uint64_t seed,
                                     const TruncatedOptions& opt = {}, std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_truncated(space, family, mu, rng, opt);
}

struct SymmetricMu {
    double mu = 0.0;
    double bound = 0.0;  // ln(alpha) / d
};

/// mu = (e/alpha)^(1/d) - 1 with target survival ln(alpha)/d.
inline SymmetricMu symmetric_mu(double p, double d, double alpha) {
    require(alpha >= 1.0 && alpha <= std::numbers::e * (1 + 1e-15), ErrorKind::InvalidArgument,
            "alpha must lie in [1, e]");
    require(d >= 1.0, ErrorKind::InvalidArgument, "d must be at least 1");
    require(p >= 0.0 && std::numbers::e * p * d <= alpha * (1 + 1e-12), ErrorKind::InvalidArgument,
            "e p d exceeds alpha");
    SymmetricMu s;
    s.mu = std::max(0.0, std::pow(std::numbers::e / alpha, 1.0 / d) - 1.0);
    s.bound = std::log(alpha) / d;
    return s;
}

struct ParallelParams {
    double p = 0.0;
    double d = 1.0;
    double alpha = 1.0;
    double r = 0.0;
    double lambda = 0.0;
    double z = 0.0;
    std::uint64_t t = 0;
    double beta = 1.0;
    std::vector<double> gamma;  // gamma_0 .. gamma_{t+1} at beta
    double bound = 0.0;         // sigma_{t+1}/q - sigma_t

    double gamma_at(double b, std::uint64_t i) const {
        double g = 0.0;
        for (std::uint64_t k = 0; k < i; ++k) g = b * r * std::pow(1.0 + g, d);
        return g;
    }
};

inline ParallelParams solve_parallel_params(double p, double d, double alpha, double tol = std::ldexp(1.0, -40)) {
    require(alpha > 1.0 && alpha <= std::numbers::e * (1 + 1e-15), ErrorKind::InvalidArgument,
            "alpha must lie in (1, e]");
    require(d >= 1.0, ErrorKind::InvalidArgument, "d must be at least 1");
    require(p >= 0.0 && p <= 1.0, ErrorKind::InvalidArgument, "p must lie in [0,1]");
    require(std::numbers::e * p * d <= alpha * (1 + 1e-12), ErrorKind::InvalidArgument, "e p d exceeds alpha");
    require(tol > 0.0, ErrorKind::InvalidArgument, "tolerance must be positive");
    ParallelParams pp;
    pp.p = p;
    pp.d = d;
    pp.alpha = alpha;
    const double la = std::log(alpha);
    pp.bound = la / d;

    if (d == 1.0) {
        // Events are mutually independent: after t full rounds an event is
        // still true with probability p^(t+1).
        pp.beta = 1.0;
        pp.t = 0;
        double surv = p;
        while (surv > la) {
            surv *= p;
            ++pp.t;
            require(pp.t < 100000, ErrorKind::NoRoot, "round count diverges");
        }
        pp.gamma.assign(pp.t + 2, 0.0);
        return pp;
    }

    pp.r = std::pow((d - 1.0) / (d - la), d - 1.0) / d;
    pp.lambda = pp.r * (d - 1.0) * std::pow(1.0 + 1.0 / (d - 1.0), d);
    pp.z = (1.0 - la) / (d - 1.0);
    pp.t = 1;
    while (pp.gamma_at(1.0, pp.t) < pp.z) {
        ++pp.t;
        require(pp.t < 10000000, ErrorKind::NoRoot, "no round count reaches z");
    }
    double lo = 0.0, hi = 1.0;
    // Bisect until both the bracket and the residual are within tol.
    while (hi - lo > tol || pp.z - pp.gamma_at(lo, pp.t) > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (pp.gamma_at(mid, pp.t) <= pp.z ? lo : hi) = mid;
    }
    pp.beta = lo;
    pp.gamma.resize(pp.t + 2);
    for (std::uint64_t i = 0; i < pp.t + 2; ++i) pp.gamma[i] = pp.gamma_at(pp.beta, i);
    return pp;
}

struct ParallelResult {
    Configuration config;
    std::vector<char> marks;
    std::vector<std::vector<std::size_t>> rounds;  // independent set resampled in each round
    std::uint64_t resamplings = 0;
    std::vector<std::size_t> survivors;
};

/// Greedy maximal independent set by event index among the candidates.
inline std::vector<std::size_t> greedy_mis(const std::vector<std::size_t>& candidates, const DependencyGraph& g) {
    std::vector<std::size_t> chosen;
    for (auto c : candidates) {
        bool ok = true;
        for (auto s : chosen)
            if (g.dependent(c, s)) {
                ok = false;
                break;
            }
        if (ok) chosen.push_back(c);
    }
    return chosen;
}

/// Lock-step simulation of the parallel truncated algorithm for a fixed number
/// of rounds. rounds < 0 uses params.t.
inline ParallelResult run_parallel_truncated(const ProductSpace& space, const BadEventFamily& family,
                                             const ParallelParams& params, CounterRng& rng,
                                             std::int64_t rounds = -1) {
    DependencyGraph g(family, space.size());
    ParallelResult res;
    res.config = sample_initial(space, rng);
    res.marks.resize(family.size());
    for (auto& y : res.marks) y = rng.bernoulli(params.beta);
    const std::uint64_t t = rounds < 0 ? params.t : static_cast<std::uint64_t>(rounds);
    std::vector<int> buf;
    std::vector<std::size_t> live;
    for (std::uint64_t round = 0; round < t; ++round) {
        live.clear();
        for (std::size_t i = 0; i < family.size(); ++i)
            if (res.marks[i] && family[i].holds(res.config, buf)) live.push_back(i);
        if (live.empty()) {
            res.rounds.emplace_back();
            continue;
        }
        auto mis = greedy_mis(live, g);
        for (auto b : mis) {
            for (auto v : family[b].scope) res.config[v] = space.sample(v, rng);
            res.marks[b] = rng.bernoulli(params.beta);
        }
        res.resamplings += mis.size();
        res.rounds.push_back(std::move(mis));
    }
    res.survivors = true_events(family, res.config);
    return res;
}

inline ParallelResult run_parallel_truncated(const ProductSpace& space, const BadEventFamily& family,
                                             const ParallelParams& params, std::uint64_t seed,
                                             std::int64_t rounds = -1, std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return run_parallel_truncated(space, family, params, rng, rounds);
}

struct SigmaCheck {
    bool satisfied = true;
    std::size_t worst_level = 0;
    std::size_t worst_event = 0;
    double slack = std::numeric_limits<double>::infinity();
    std::vector<double> survival_bound;  // sigma_{t+1}/q - sigma_t per event
};

/// Checks a table sigma[i][B], i = 1..t+1 (sigma[0] is taken as zero and must
/// be supplied as such), against the recurrence of the parallel analysis.
inline SigmaCheck check_sigma_recurrence(const BadEventFamily& family, const DependencyGraph& g,
                                         const std::vector<double>& q,
                                         const std::vector<std::vector<double>>& sigma,
                                         std::size_t exact_limit = kDefaultExactLimit) {
    require(sigma.size() >= 2, ErrorKind::InvalidArgument, "sigma table needs levels 0 and 1");
    require(q.size() == family.size(), ErrorKind::InvalidArgument, "q vector has wrong length");
    for (const auto& row : sigma)
        require(row.size() == family.size(), ErrorKind::InvalidArgument, "sigma row has wrong length");
    SigmaCheck sc;
    auto note = [&](double s, std::size_t level, std::size_t b) {
        if (s < sc.slack) {
            sc.slack = s;
            sc.worst_level = level;
            sc.worst_event = b;
        }
    };
    for (std::size_t b = 0; b < family.size(); ++b) note(sigma[1][b] - q[b] * family[b].prob, 1, b);
    for (std::size_t i = 1; i + 1 < sigma.size(); ++i)
        for (std::size_t b = 0; b < family.size(); ++b) {
            const auto& nb = g.neighbors(b);
            const double hi = independent_subset_sum(nb, sigma[i], g, exact_limit).value;
            const double lo = independent_subset_sum(nb, sigma[i - 1], g, exact_limit).value;
            note(sigma[i + 1][b] - sigma[i][b] - q[b] * family[b].prob * (hi - lo), i + 1, b);
        }
    sc.satisfied = sc.slack >= -kCriterionTol;
    const auto& last = sigma.back();
    const auto& prev = sigma[sigma.size() - 2];
    sc.survival_bound.resize(family.size());
    for (std::size_t b = 0; b < family.size(); ++b)
        sc.survival_bound[b] = q[b] > 0.0 ? last[b] / q[b] - prev[b] : 1.0;
    return sc;
}

}  // namespace lll
