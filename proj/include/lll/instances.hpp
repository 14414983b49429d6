#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lll/analysis.hpp"
#include "lll/events.hpp"
#include "lll/rng.hpp"
#include "lll/space.hpp"

namespace lll {

/// An event outside the bad family, used as a probe in distribution checks.
struct ProbeEvent {
    std::string name;
    std::vector<std::size_t> scope;
    EventPredicate predicate;
    double prob = 0.0;

    bool holds(const Configuration& x) const {
        std::vector<int> buf(scope.size());
        for (std::size_t j = 0; j < scope.size(); ++j) buf[j] = x[scope[j]];
        return predicate(std::span<const int>(buf.data(), buf.size()));
    }
};

struct Instance {
    std::string name;
    ProductSpace space;
    BadEventFamily family;
    std::vector<ProbeEvent> probes;
    std::vector<std::pair<std::size_t, std::size_t>> probe_pairs;  // (probe index, bad event)
};

inline ProbeEvent make_probe(const ProductSpace& space, std::string name, std::vector<std::size_t> scope,
                             EventPredicate pred) {
    ProbeEvent e;
    e.name = std::move(name);
    e.prob = scope_probability(space, scope, pred);
    e.scope = std::move(scope);
    e.predicate = std::move(pred);
    return e;
}

/// Five variables, four overlapping bad events, weights at the least fixed
/// point of mu = theta(mu).
inline Instance reference_instance() {
    Instance in;
    in.name = "reference-5x4";
    in.space = ProductSpace({{0.5, 0.3, 0.2}, {0.6, 0.4}, {0.5, 0.5}, {0.4, 0.4, 0.2}, {0.7, 0.3}});
    const auto& sp = in.space;
    in.family.add(make_event(sp, {0, 1}, [](std::span<const int> v) { return v[0] >= 1 && v[1] == 1; }));
    in.family.add(make_event(sp, {1, 2}, [](std::span<const int> v) { return v[0] == 1 && v[1] == 1; }));
    in.family.add(make_event(sp, {2, 3}, [](std::span<const int> v) { return v[0] == 1 && v[1] == 2; }));
    in.family.add(make_event(sp, {0, 3, 4}, [](std::span<const int> v) { return v[0] == 2 && v[1] >= 1 && v[2] == 1; }));
    DependencyGraph g(in.family, sp.size());
    std::vector<double> mu;
    solve_minimal_mu(in.family, g, mu);
    in.family.set_mu(mu);

    using S = std::span<const int>;
    in.probes.push_back(make_probe(sp, "x0=0", {0}, [](S v) { return v[0] == 0; }));
    in.probes.push_back(make_probe(sp, "x1=1", {1}, [](S v) { return v[0] == 1; }));
    in.probes.push_back(make_probe(sp, "x2=1", {2}, [](S v) { return v[0] == 1; }));
    in.probes.push_back(make_probe(sp, "x3=2", {3}, [](S v) { return v[0] == 2; }));
    in.probes.push_back(make_probe(sp, "x4=1", {4}, [](S v) { return v[0] == 1; }));
    in.probes.push_back(make_probe(sp, "x0=2", {0}, [](S v) { return v[0] == 2; }));
    in.probes.push_back(make_probe(sp, "x1=0&x2=0", {1, 2}, [](S v) { return v[0] == 0 && v[1] == 0; }));
    in.probes.push_back(make_probe(sp, "x0>=1&x4=1", {0, 4}, [](S v) { return v[0] >= 1 && v[1] == 1; }));
    in.probes.push_back(make_probe(sp, "x2=1|x3=2", {2, 3}, [](S v) { return v[0] == 1 || v[1] == 2; }));
    in.probes.push_back(make_probe(sp, "x1=1&x3>=1", {1, 3}, [](S v) { return v[0] == 1 && v[1] >= 1; }));
    in.probe_pairs = {{1, 0}, {2, 1}, {3, 2}, {5, 3}, {8, 1}};
    return in;
}

/// Ring of m events; event i asks variables i..i+w-1 (mod m) all to be 1,
/// each variable being 1 with probability c.
inline Instance ring_instance(std::size_t m, std::size_t width, double c) {
    require(m >= 2 * width, ErrorKind::InvalidArgument, "ring too short for its width");
    Instance in;
    in.name = "ring";
    in.space = ProductSpace::bernoulli(std::vector<double>(m, c));
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::size_t> scope;
        for (std::size_t j = 0; j < width; ++j) scope.push_back((i + j) % m);
        std::sort(scope.begin(), scope.end());
        BadEvent e;
        e.scope = scope;
        e.predicate = [](std::span<const int> v) {
            for (int x : v)
                if (x != 1) return false;
            return true;
        };
        e.prob = std::pow(c, static_cast<double>(width));
        in.family.add(std::move(e));
    }
    return in;
}

/// Ring instance with e*p*d = alpha, where d = 2*width - 1 is the inclusive
/// neighbourhood size.
inline Instance symmetric_ring(std::size_t m, std::size_t width, double alpha) {
    const double d = 2.0 * static_cast<double>(width) - 1.0;
    const double p = alpha / (std::numbers::e * d);
    return ring_instance(m, width, std::pow(p, 1.0 / static_cast<double>(width)));
}

struct RandomInstanceSpec {
    std::size_t vars = 7;
    std::size_t events = 5;
    std::size_t min_scope = 2;
    std::size_t max_scope = 3;
    std::size_t max_domain = 3;
    double forbid = 0.25;     // chance that each joint value is forbidden
    bool need_criterion = true;
};

/// Random small instance: random domains and probabilities, each event forbids
/// a random set of joint values on a random scope. When need_criterion is set
/// the draw is repeated until the least fixed point of mu = theta(mu) exists.
inline Instance random_instance(std::uint64_t seed, const RandomInstanceSpec& spec = {}) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        CounterRng rng(seed, attempt);
        const double forbid = spec.forbid * std::pow(0.85, static_cast<double>(attempt));
        Instance in;
        in.name = "random-" + std::to_string(seed);
        std::vector<std::vector<double>> probs(spec.vars);
        for (auto& p : probs) {
            const std::size_t d = 2 + rng.below(spec.max_domain - 1);
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                p.push_back(0.2 + rng.uniform());
                s += p.back();
            }
            for (auto& x : p) x /= s;
        }
        in.space = ProductSpace(probs);
        for (std::size_t e = 0; e < spec.events; ++e) {
            const std::size_t w = spec.min_scope + rng.below(spec.max_scope - spec.min_scope + 1);
            std::vector<std::size_t> scope;
            while (scope.size() < w) {
                const auto v = static_cast<std::size_t>(rng.below(spec.vars));
                if (std::find(scope.begin(), scope.end(), v) == scope.end()) scope.push_back(v);
            }
            std::sort(scope.begin(), scope.end());
            std::size_t states = 1;
            std::vector<std::size_t> radix;
            for (auto v : scope) {
                radix.push_back(in.space.domain_size(v));
                states *= in.space.domain_size(v);
            }
            std::vector<char> forbidden(states, 0);
            bool any = false;
            for (auto& f : forbidden) any |= (f = rng.bernoulli(forbid));
            if (!any) forbidden[rng.below(states)] = 1;
            auto pred = [forbidden, radix](std::span<const int> v) {
                std::size_t idx = 0;
                for (std::size_t j = v.size(); j-- > 0;) idx = idx * radix[j] + static_cast<std::size_t>(v[j]);
                return forbidden[idx] != 0;
            };
            in.family.add(make_event(in.space, scope, pred));
        }
        DependencyGraph g(in.family, in.space.size());
        std::vector<double> mu;
        const bool ok = solve_minimal_mu(in.family, g, mu, 5000, 1e-14);
        if (!ok && spec.need_criterion) continue;
        if (ok) in.family.set_mu(mu);
        // Probes: x0=0, x1=0, x2=0 and x3=x4.
        for (std::size_t v = 0; v < std::min<std::size_t>(spec.vars, 3); ++v)
            in.probes.push_back(make_probe(in.space, "x" + std::to_string(v) + "=0", {v},
                                           [](std::span<const int> a) { return a[0] == 0; }));
        if (spec.vars >= 5)
            in.probes.push_back(make_probe(in.space, "x3=x4", {3, 4},
                                       [](std::span<const int> a) { return a[0] == a[1]; }));
        for (std::size_t b = 0; b < std::min<std::size_t>(spec.events, 3); ++b) in.probe_pairs.emplace_back(b % in.probes.size(), b);
        return in;
    }
}

}  // namespace lll
