#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "lll/analysis.hpp"
#include "lll/engine.hpp"
#include "lll/error.hpp"
#include "lll/events.hpp"
#include "lll/rng.hpp"
#include "lll/space.hpp"
#include "lll/truncated.hpp"

namespace lll {

/// Width-k CNF. Literals are +v / -v with v in 1..n (DIMACS numbering).
struct CnfInstance {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::vector<int>> clauses;

    void validate() const {
        for (std::size_t c = 0; c < clauses.size(); ++c) {
            const auto& cl = clauses[c];
            require(cl.size() == k, ErrorKind::InvariantViolation,
                    "clause " + std::to_string(c) + " has width " + std::to_string(cl.size()) + ", expected " +
                        std::to_string(k));
            std::vector<int> vars;
            for (int lit : cl) {
                require(lit != 0 && static_cast<std::size_t>(std::abs(lit)) <= n, ErrorKind::InvariantViolation,
                        "literal out of range in clause " + std::to_string(c));
                vars.push_back(std::abs(lit));
            }
            std::sort(vars.begin(), vars.end());
            require(std::adjacent_find(vars.begin(), vars.end()) == vars.end(), ErrorKind::InvariantViolation,
                    "clause " + std::to_string(c) + " repeats a variable");
        }
    }

    std::size_t m() const { return clauses.size(); }

    /// Occurrences l_i per variable (0-based index).
    std::vector<std::size_t> occurrences() const {
        std::vector<std::size_t> l(n, 0);
        for (const auto& cl : clauses)
            for (int lit : cl) ++l[static_cast<std::size_t>(std::abs(lit) - 1)];
        return l;
    }

    std::size_t max_occurrence() const {
        auto l = occurrences();
        return l.empty() ? 0 : *std::max_element(l.begin(), l.end());
    }

    /// Fraction of positive occurrences; 1/2 for unused variables.
    std::vector<double> positive_fraction() const {
        std::vector<double> pos(n, 0.0), tot(n, 0.0);
        for (const auto& cl : clauses)
            for (int lit : cl) {
                const auto v = static_cast<std::size_t>(std::abs(lit) - 1);
                tot[v] += 1;
                if (lit > 0) pos[v] += 1;
            }
        for (std::size_t v = 0; v < n; ++v) pos[v] = tot[v] > 0 ? pos[v] / tot[v] : 0.5;
        return pos;
    }

    bool satisfied(std::size_t c, const Configuration& x) const {
        for (int lit : clauses[c])
            if ((x[static_cast<std::size_t>(std::abs(lit) - 1)] == 1) == (lit > 0)) return true;
        return false;
    }

    std::size_t count_satisfied(const Configuration& x) const {
        std::size_t s = 0;
        for (std::size_t c = 0; c < m(); ++c) s += satisfied(c, x);
        return s;
    }
};

/// Largest occurrence count the bias argument allows: alpha 2^(k+1)/(e k) - 2/k.
inline double ksat_max_L(std::size_t k, double alpha) {
    const double kk = static_cast<double>(k);
    return alpha * std::ldexp(1.0, static_cast<int>(k) + 1) / (std::numbers::e * kk) - 2.0 / kk;
}

/// Expected-satisfied bound m (1 - 2^-k e ln(alpha) / alpha).
inline double ksat_bound(std::size_t m, std::size_t k, double alpha) {
    return static_cast<double>(m) *
           (1.0 - std::ldexp(1.0, -static_cast<int>(k)) * std::numbers::e * std::log(alpha) / alpha);
}

/// Random width-k CNF, every variable used at most L times, random signs.
inline CnfInstance random_ksat(std::size_t n, std::size_t m, std::size_t k, std::size_t L, std::uint64_t seed) {
    require(k >= 1 && n >= k, ErrorKind::InvalidArgument, "need n >= k >= 1");
    require(n * L >= m * k, ErrorKind::InvalidArgument, "not enough occurrence slots");
    CounterRng rng(seed, 0x6b73);
    CnfInstance inst;
    inst.n = n;
    inst.k = k;
    std::vector<int> slots;
    for (std::size_t v = 1; v <= n; ++v)
        for (std::size_t j = 0; j < L; ++j) slots.push_back(static_cast<int>(v));
    for (std::size_t attempt = 0;; ++attempt) {
        require(attempt < 1000, ErrorKind::InvalidArgument, "could not build distinct-variable clauses");
        for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[rng.below(i)]);
        // Pull a later slot forward whenever a clause would repeat a variable.
        bool ok = true;
        for (std::size_t at = 0; at < m * k && ok; ++at) {
            const std::size_t start = at - at % k;
            auto clash = [&](int v) { return std::find(slots.begin() + start, slots.begin() + at, v) != slots.begin() + at; };
            std::size_t j = at;
            while (j < slots.size() && clash(slots[j])) ++j;
            if (j == slots.size()) ok = false;
            else std::swap(slots[at], slots[j]);
        }
        if (!ok) continue;
        inst.clauses.assign(m, {});
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t j = 0; j < k; ++j)
                inst.clauses[c].push_back(rng.below(2) ? slots[c * k + j] : -slots[c * k + j]);
        inst.validate();
        return inst;
    }
}

struct BiasParams {
    double alpha = 1.0;
    std::size_t L = 0;
    double z = 0.0;  // 2 ln(2^(k+1) / (2 + kL)) / (2 + kL)
    double x = 0.0;  // L z / 2
    std::vector<double> p_true;  // 1/2 - x (delta_i - 1/2)
};

inline BiasParams bias_params(const CnfInstance& inst, double alpha) {
    require(alpha >= 1.0 && alpha <= std::numbers::e * (1 + 1e-15), ErrorKind::InvalidArgument,
            "alpha must lie in [1, e]");
    inst.validate();
    BiasParams b;
    b.alpha = alpha;
    b.L = inst.max_occurrence();
    require(static_cast<double>(b.L) <= ksat_max_L(inst.k, alpha) + 1e-12, ErrorKind::CriterionViolated,
            "L = " + std::to_string(b.L) + " exceeds alpha 2^(k+1)/(e k) - 2/k");
    const double s = 2.0 + static_cast<double>(inst.k * b.L);
    b.z = 2.0 * std::log(std::ldexp(1.0, static_cast<int>(inst.k) + 1) / s) / s;
    b.x = static_cast<double>(b.L) * b.z / 2.0;
    for (double d : inst.positive_fraction()) {
        const double p = 0.5 - b.x * (d - 0.5);
        require(p >= 0.0 && p <= 1.0, ErrorKind::InvariantViolation, "bias left [0, 1]");
        b.p_true.push_back(p);
    }
    return b;
}

/// Clauses conflict when they share a variable with opposite signs.
inline bool clauses_conflict(const std::vector<int>& a, const std::vector<int>& b) {
    for (int x : a)
        for (int y : b)
            if (x == -y) return true;
    return false;
}

/// Everything a truncated run needs, built once per instance.
struct KsatSetup {
    CnfInstance inst;
    BiasParams bias;
    ProductSpace space;
    BadEventFamily family;  // clause-falsified events, lopsided relation
    std::vector<double> mu;
    CoreMarks marks;
    AugmentedFamily augmented;
    double bound = 0.0;
    bool shortcut = false;  // m < 2^(k-1); callers may clear it to force the resampling run
};

inline KsatSetup ksat_setup(const CnfInstance& inst, double alpha, std::size_t exact_limit = kDefaultExactLimit) {
    KsatSetup s;
    s.inst = inst;
    s.bias = bias_params(inst, alpha);
    s.bound = ksat_bound(inst.m(), inst.k, alpha);
    s.shortcut = static_cast<double>(inst.m()) < std::ldexp(1.0, static_cast<int>(inst.k) - 1);
    std::vector<double> p_one = s.bias.p_true;
    s.space = ProductSpace::bernoulli(p_one);
    for (const auto& cl : inst.clauses) {
        BadEvent e;
        std::vector<int> lits = cl;
        std::sort(lits.begin(), lits.end(), [](int a, int b) { return std::abs(a) < std::abs(b); });
        std::vector<int> want;  // value making each literal false
        for (int lit : lits) {
            e.scope.push_back(static_cast<std::size_t>(std::abs(lit) - 1));
            want.push_back(lit > 0 ? 0 : 1);
        }
        e.predicate = [want](std::span<const int> v) {
            for (std::size_t j = 0; j < want.size(); ++j)
                if (v[j] != want[j]) return false;
            return true;
        };
        e.prob = 1.0;
        for (std::size_t j = 0; j < want.size(); ++j) e.prob *= s.space.prob(e.scope[j], want[j]);
        e.mu = s.bias.z;
        s.family.add(std::move(e));
    }
    s.family.set_relation([clauses = inst.clauses](std::size_t i, std::size_t j) {
        return clauses_conflict(clauses[i], clauses[j]);
    });
    s.mu.assign(inst.m(), s.bias.z);
    DependencyGraph g(s.family, s.space.size());
    s.marks = core_marks(s.family, g, s.mu, exact_limit);
    s.augmented = augment(s.space, s.family, s.marks.q);
    const auto check = check_pegden(s.augmented.family, g, s.mu, exact_limit);
    require(check.satisfied, ErrorKind::CriterionViolated,
            "augmented clause family fails the criterion at clause " + std::to_string(check.worst_event));
    return s;
}

struct KsatResult {
    Configuration assignment;
    std::size_t satisfied = 0;
    std::size_t falsified = 0;
    std::uint64_t resamplings = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t restarts = 0;
};

/// One truncated run over a prepared setup.
inline KsatResult run_partial_ksat(const KsatSetup& s, CounterRng& rng, const MtOptions& opt = {}) {
    KsatResult r;
    if (s.shortcut) {
        // Few clauses: a uniform assignment satisfies everything with
        // probability at least 1/2.
        const auto uni = ProductSpace::uniform(s.inst.n, 2);
        for (;; ++r.restarts) {
            require(r.restarts < 10'000, ErrorKind::CapExceeded, "too many restarts");
            r.assignment = sample_initial(uni, rng);
            if (s.inst.count_satisfied(r.assignment) == s.inst.m()) break;
        }
        r.satisfied = s.inst.m();
        r.counts.assign(s.inst.m(), 0);
        return r;
    }
    MtOptions mo = opt;
    mo.record_log = false;
    auto out = run_mt(s.augmented.space, s.augmented.family, rng, mo);
    require(out.status == RunStatus::Success, ErrorKind::CapExceeded, "k-SAT resampling cap reached");
    r.assignment.assign(out.config.begin(), out.config.begin() + static_cast<std::ptrdiff_t>(s.inst.n));
    r.satisfied = s.inst.count_satisfied(r.assignment);
    r.falsified = s.inst.m() - r.satisfied;
    r.resamplings = out.resamplings;
    r.counts = std::move(out.counts);
    return r;
}

inline KsatResult run_partial_ksat(const CnfInstance& inst, double alpha, std::uint64_t seed,
                                   std::uint64_t stream = 0) {
    const auto s = ksat_setup(inst, alpha);
    CounterRng rng(seed, stream);
    return run_partial_ksat(s, rng);
}

}  // namespace lll
