#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

#include "lll/analysis.hpp"
#include "lll/engine.hpp"
#include "lll/instances.hpp"
#include "lll/stats.hpp"

using namespace lll;
using Catch::Approx;

namespace {

// Independent oracle: every subset, checked pairwise.
double brute_subset_sum(const std::vector<std::size_t>& s, const std::vector<double>& mu, const DependencyGraph& g) {
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << s.size()); ++mask) {
        bool indep = true;
        double w = 1.0;
        for (std::size_t a = 0; a < s.size() && indep; ++a) {
            if (!(mask >> a & 1)) continue;
            w *= mu[s[a]];
            for (std::size_t b = a + 1; b < s.size(); ++b)
                if ((mask >> b & 1) && g.dependent(s[a], s[b])) indep = false;
        }
        if (indep) total += w;
    }
    return total;
}

BadEvent all_ones(std::vector<std::size_t> scope, double prob) {
    BadEvent e;
    e.scope = std::move(scope);
    e.prob = prob;
    e.predicate = [](std::span<const int> v) {
        for (int x : v)
            if (x != 1) return false;
        return true;
    };
    return e;
}

}  // namespace

TEST_CASE("independent_subset_sum examples", "[analysis]") {
    auto sp = ProductSpace::uniform(4, 2);
    BadEventFamily dep;
    dep.add(all_ones({0, 1}, 0.25));
    dep.add(all_ones({1, 2}, 0.25));
    DependencyGraph gd(dep, 4);
    CHECK(independent_subset_sum({}, {0.5, 0.5}, gd).value == 1.0);
    CHECK(independent_subset_sum({0, 1}, {0.5, 0.5}, gd).value == Approx(2.0));

    BadEventFamily ind;
    ind.add(all_ones({0, 1}, 0.25));
    ind.add(all_ones({2, 3}, 0.25));
    DependencyGraph gi(ind, 4);
    auto s = independent_subset_sum({0, 1}, {0.5, 0.5}, gi);
    CHECK(s.value == Approx(2.25));
    CHECK(s.exact);
    auto capped = independent_subset_sum({0, 1}, {0.5, 0.5}, gd, 1);
    CHECK_FALSE(capped.exact);
    CHECK(capped.value == Approx(2.25));
}

TEST_CASE("theta examples", "[analysis]") {
    auto sp = ProductSpace::uniform(5, 2);
    BadEventFamily fam;
    fam.add(all_ones({0, 1}, 0.25));
    fam.add(all_ones({1, 2}, 0.25));
    DependencyGraph g(fam, 5);
    CHECK(theta_of_scope(0.1, {4}, {0.5, 0.5}, g).value == Approx(0.1));
    CHECK(theta(0.1, {0, 1}, {0.5, 0.5}, g).value == Approx(0.2));
    CHECK(theta_of_scope(0.1, {0, 2}, {0.5, 0.5}, g).value == Approx(0.2));
}

TEST_CASE("theta in the symmetric setting is below P(E) exp(e p |N(E)|)", "[analysis]") {
    auto in = ring_instance(20, 3, 0.4);
    const double p = std::pow(0.4, 3);
    std::vector<double> mu(in.family.size(), std::numbers::e * p);
    DependencyGraph g(in.family, in.space.size());
    for (std::size_t w = 1; w <= 4; ++w) {
        std::vector<std::size_t> scope;
        for (std::size_t v = 0; v < w; ++v) scope.push_back(v);
        const auto nb = g.neighborhood_of_scope(scope);
        const double pe = std::pow(0.5, static_cast<double>(w));
        CHECK(theta(pe, nb, mu, g).value <= pe * std::exp(std::numbers::e * p * static_cast<double>(nb.size())));
    }
}

TEST_CASE("check_pegden examples", "[analysis]") {
    {
        BadEventFamily fam;
        fam.add(all_ones({0}, 0.5));
        DependencyGraph g(fam, 1);
        auto r = check_pegden(fam, g, std::vector<double>{1.0});
        CHECK(r.satisfied);
        CHECK(r.slack == Approx(0.0).margin(1e-15));
    }
    {
        BadEventFamily fam;
        fam.add(all_ones({0}, 0.9));
        DependencyGraph g(fam, 1);
        auto r = check_pegden(fam, g, std::vector<double>{1.0});
        CHECK_FALSE(r.satisfied);
        CHECK(r.slack == Approx(-0.8));
        CHECK(r.worst_event == 0);
    }
    {
        // Two dependent events, p = 1/8 each, mu = e p.
        BadEventFamily fam;
        fam.add(all_ones({0, 1, 2}, 0.125));
        fam.add(all_ones({2, 3, 4}, 0.125));
        DependencyGraph g(fam, 5);
        const double mu = std::numbers::e * 0.125;
        auto r = check_pegden(fam, g, {mu, mu});
        CHECK(r.satisfied);
        CHECK(mu == Approx(0.3398).margin(1e-4));
        CHECK(r.theta[0] == Approx(0.125 * (1 + 2 * mu)));
        CHECK(r.theta[0] <= 0.125 * (1 + mu) * (1 + mu));
        CHECK(r.theta[0] < mu);
        CHECK(r.epsilon_slack == Approx(mu / r.theta[0] - 1));
    }
}

TEST_CASE("check_symmetric examples", "[analysis]") {
    auto a = check_symmetric(0.125, 2);
    CHECK(a.satisfied);
    CHECK(a.alpha == Approx(0.6796).margin(1e-3));
    auto b = check_symmetric(1.0 / std::numbers::e, 1);
    CHECK(b.satisfied);
    CHECK(b.alpha == Approx(1.0));
    auto c = check_symmetric(0.25, 2);
    CHECK_FALSE(c.satisfied);
    CHECK(c.alpha == Approx(1.359).margin(1e-3));
    CHECK_THROWS_AS(check_symmetric(1.5, 2), Error);
    CHECK_THROWS_AS(check_symmetric(0.5, 0), Error);
}

TEST_CASE("bound_runtime examples", "[analysis]") {
    BadEventFamily fam;
    auto e = all_ones({0}, 0.5);
    e.mu = 1.0;
    fam.add(e);
    DependencyGraph g(fam, 2);
    CHECK(bound_runtime({}, fam, g).bound == 0.0);
    EventDecomposition d;
    d.terms.push_back({1.0, 0.2, {}});
    CHECK(bound_runtime(d, fam, g).bound == Approx(0.4));
    d.terms.push_back({-1.0, 0.2, {}});
    CHECK_THROWS_AS(bound_runtime(d, fam, g), Error);

    fam[0].mu = 0.5;
    d.terms.pop_back();
    try {
        bound_runtime(d, fam, g);
        FAIL("expected criterion-violated");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::CriterionViolated);
    }
    CHECK(bound_runtime_per_event({2.0, 3.0}, {0.5, 1.0}) == Approx(4.0));
}

TEST_CASE("clique decomposition bound", "[analysis]") {
    auto rb = ramsey_runtime_bound(15, 5);
    CHECK(rb.p == Approx(std::pow(2.0, -9)));
    CHECK(rb.degree == Approx(1700));
    CHECK(std::isfinite(rb.bound));
    CHECK(rb.bound > 0.0);
    CHECK_FALSE(rb.symmetric_ok);
    // Small cliques dominate when n is far below the threshold.
    auto tiny = ramsey_runtime_bound(6, 5);
    CHECK(tiny.symmetric_ok);
}

TEST_CASE("subset sum: enumeration matches brute force and never exceeds the product", "[analysis]") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto in = random_instance(seed, {.vars = 9, .events = 12, .need_criterion = false});
        DependencyGraph g(in.family, in.space.size());
        CounterRng rng(seed, 1000);
        std::vector<double> mu(in.family.size());
        for (auto& m : mu) m = rng.uniform();
        std::vector<std::size_t> all(in.family.size());
        std::iota(all.begin(), all.end(), 0);
        const auto exact = independent_subset_sum(all, mu, g);
        const auto bound = independent_subset_sum(all, mu, g, 0);
        CHECK(exact.exact);
        CHECK(exact.value == Approx(brute_subset_sum(all, mu, g)).epsilon(1e-12));
        CHECK(exact.value <= bound.value * (1 + 1e-12));
    }
}

TEST_CASE("theta is monotone in mu", "[analysis]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto in = random_instance(seed, {.vars = 8, .events = 10, .need_criterion = false});
        DependencyGraph g(in.family, in.space.size());
        CounterRng rng(seed, 77);
        std::vector<double> mu(in.family.size());
        for (auto& m : mu) m = rng.uniform();
        for (std::size_t i = 0; i < in.family.size(); ++i) {
            auto raised = mu;
            raised[(i + 3) % mu.size()] += 0.5;
            CHECK(theta_of_event(i, in.family, raised, g).value >= theta_of_event(i, in.family, mu, g).value);
        }
    }
}

TEST_CASE("symmetric criterion implies the weighted one at mu = e p", "[analysis]") {
    for (std::size_t width = 2; width <= 4; ++width)
        for (double alpha : {0.3, 0.7, 1.0}) {
            auto in = symmetric_ring(24, width, alpha);
            DependencyGraph g(in.family, in.space.size());
            const double p = in.family[0].prob;
            REQUIRE(check_symmetric(p, static_cast<double>(g.max_degree() + 1)).satisfied);
            std::vector<double> mu(in.family.size(), std::numbers::e * p);
            CHECK(check_pegden(in.family, g, mu).satisfied);
        }
}

TEST_CASE("least fixed point of mu = theta(mu)", "[analysis]") {
    auto in = reference_instance();
    DependencyGraph g(in.family, in.space.size());
    auto r = check_pegden(in.family, g);
    CHECK(r.satisfied);
    for (std::size_t i = 0; i < in.family.size(); ++i) CHECK(r.theta[i] == Approx(in.family[i].mu).epsilon(1e-12));
    BadEventFamily hopeless;
    hopeless.add(all_ones({0}, 0.6));
    hopeless.add(all_ones({0, 1}, 0.6));
    DependencyGraph gh(hopeless, 2);
    std::vector<double> mu;
    CHECK_FALSE(solve_minimal_mu(hopeless, gh, mu));
}

TEST_CASE("output frequency of outside events stays under theta", "[analysis][mc]") {
    auto in = reference_instance();
    DependencyGraph g(in.family, in.space.size());
    const auto mu = in.family.mu();
    std::vector<std::string> names;
    for (const auto& e : in.probes) names.push_back(e.name);
    auto rep = mc_run(names, 100000, 2024, [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
        auto r = run_mt(in.space, in.family, rng, {.record_log = false});
        for (std::size_t i = 0; i < in.probes.size(); ++i) out[i] = in.probes[i].holds(r.config);
    });
    for (std::size_t i = 0; i < in.probes.size(); ++i) {
        const auto th = theta_of_scope(in.probes[i].prob, in.probes[i].scope, mu, g);
        const double f = rep.stats[i].mean;
        CHECK(within_upper(f, th.value, bernoulli_sigma(f, th.value, rep.trials)));
    }
}
