#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "lll/instances.hpp"
#include "lll/stats.hpp"
#include "lll/truncated.hpp"

using namespace lll;
using Catch::Approx;

namespace {

BadEventFamily single_event(double p) {
    BadEventFamily fam;
    BadEvent e;
    e.scope = {0};
    e.prob = p;
    e.predicate = [](std::span<const int> v) { return v[0] == 1; };
    fam.add(e);
    return fam;
}

}  // namespace

TEST_CASE("q = 1 reproduces plain MT exactly", "[truncated]") {
    for (std::size_t width = 2; width <= 3; ++width) {
        auto in = symmetric_ring(12, width, 0.6);
        DependencyGraph g(in.family, in.space.size());
        const double p = in.family[0].prob;
        std::vector<double> mu(in.family.size(), std::numbers::e * p);
        REQUIRE(check_pegden(in.family, g, mu).slack > 0.0);
        for (std::uint64_t s = 0; s < 200; ++s) {
            auto t = run_truncated(in.space, in.family, mu, 9, {}, s);
            for (double q : t.marks.q) REQUIRE(q == 1.0);
            auto m = run_mt(in.space, in.family, 9, {}, s);
            CHECK(t.config == m.config);
            CHECK(t.log.events() == m.log.events());
            CHECK(t.counts == m.counts);
            CHECK(t.survivors.empty());
        }
    }
}

TEST_CASE("mu = 0 leaves the initial sample alone", "[truncated][mc]") {
    auto in = ring_instance(10, 2, 0.5);
    std::vector<double> mu(in.family.size(), 0.0);
    auto rep = mc_run({"b0"}, 40000, 3, [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
        auto r = run_truncated(in.space, in.family, mu, rng, {.record_log = false});
        if (r.resamplings != 0) throw Error(ErrorKind::InvariantViolation, "resampled with q = 0");
        out[0] = in.family[0].holds(r.config);
    });
    const double sigma = std::sqrt(0.25 * 0.75 / 40000);
    CHECK(std::abs(rep.stats[0].mean - 0.25) <= 3 * sigma);
}

TEST_CASE("single event p = 0.9 with mu = 0.5", "[truncated][mc]") {
    auto sp = ProductSpace::bernoulli({0.9});
    auto fam = single_event(0.9);
    DependencyGraph g(fam, 1);
    const std::vector<double> mu{0.5};
    const double th = theta_of_event(0, fam, mu, g).value;
    CHECK(th == Approx(1.35));
    const double bound = std::max(0.0, th - 0.5);
    auto rep = mc_run({"survive", "count"}, 100000, 51, [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
        auto r = run_truncated(sp, fam, mu, rng, {.record_log = false});
        out[0] = !r.survivors.empty();
        out[1] = static_cast<double>(r.counts[0]);
    });
    const double f = rep.stats[0].mean;
    CHECK(within_upper(f, bound, bernoulli_sigma(f, bound, rep.trials)));
    CHECK(within_upper(rep.stats[1].mean, 0.5, rep.stats[1].sem));
}

TEST_CASE("augmented family meets the criterion for arbitrary weights", "[truncated]") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto in = random_instance(seed, {.vars = 8, .events = 9, .need_criterion = false});
        DependencyGraph g(in.family, in.space.size());
        CounterRng rng(seed, 5);
        std::vector<double> mu(in.family.size());
        for (auto& m : mu) m = 2.0 * rng.uniform();
        auto cm = core_marks(in.family, g, mu);
        auto aug = augment(in.space, in.family, cm.q);
        CHECK(aug.space.size() == in.space.size() + in.family.size());
        aug.family.validate(aug.space);
        CHECK(check_pegden(aug.family, g, mu).satisfied);
        auto r = run_truncated(in.space, in.family, mu, seed);
        CHECK(r.ok());
        for (auto b : r.survivors) CHECK(r.augmented[in.space.size() + b] == 0);
    }
}

TEST_CASE("symmetric ring under e p d = 2 survives within ln(2)/d", "[truncated][mc]") {
    auto in = symmetric_ring(30, 3, 2.0);
    const double p = in.family[0].prob;
    const auto sm = symmetric_mu(p, 5, 2.0);
    std::vector<double> mu(in.family.size(), sm.mu);
    std::vector<std::string> names{"survive", "count"};
    auto rep = mc_run(names, 20000, 8, [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
        auto r = run_truncated(in.space, in.family, mu, rng, {.record_log = false});
        out[0] = 0;
        for (auto b : r.survivors) out[0] += (b == 0);
        out[1] = static_cast<double>(r.counts[0]);
    });
    const double f = rep.stats[0].mean;
    CHECK(within_upper(f, sm.bound, bernoulli_sigma(f, sm.bound, rep.trials)));
    CHECK(within_upper(rep.stats[1].mean, sm.mu, rep.stats[1].sem));
}

TEST_CASE("symmetric_mu examples", "[truncated]") {
    auto a = symmetric_mu(0.01, 5, std::numbers::e);
    CHECK(a.mu == Approx(0.0).margin(1e-15));
    CHECK(a.bound == Approx(0.2));
    auto b = symmetric_mu(2.0 / (5 * std::numbers::e), 5, 2.0);
    CHECK(b.mu == Approx(std::exp((1 - std::log(2.0)) / 5) - 1).epsilon(1e-12));
    CHECK(b.mu == Approx(0.06329).margin(1e-5));
    CHECK(b.bound == Approx(0.13863).margin(1e-5));
    CHECK(symmetric_mu(0.01, 5, 1.0).bound == 0.0);
    CHECK_THROWS_AS(symmetric_mu(0.01, 5, 3.0), Error);
    CHECK_THROWS_AS(symmetric_mu(0.01, 5, 0.5), Error);
    CHECK_THROWS_AS(symmetric_mu(0.2, 5, 2.0), Error);
}

TEST_CASE("parallel parameter examples", "[truncated]") {
    auto e = solve_parallel_params(0.05, 2, std::numbers::e);
    CHECK(e.r == Approx(0.5));
    CHECK(e.lambda == Approx(2.0));
    CHECK(e.z == Approx(0.0).margin(1e-15));
    CHECK(e.beta == 0.0);

    auto two = solve_parallel_params(0.1, 2, 2.0);
    CHECK(two.r == Approx(0.5 / (2 - std::log(2.0))).epsilon(1e-12));
    CHECK(two.r == Approx(0.38260).margin(1e-5));
    CHECK(two.z == Approx(0.30685).margin(1e-5));
    CHECK(std::abs(two.gamma[two.t] - two.z) <= std::ldexp(1.0, -40));
    CHECK(two.bound == Approx(std::log(2.0) / 2));
    CHECK(two.gamma_at(1.0, two.t) >= two.z);
    if (two.t > 1) CHECK(two.gamma_at(1.0, two.t - 1) < two.z);

    auto one = solve_parallel_params(0.7, 1, 2.0);
    CHECK(one.beta == 1.0);
    CHECK(std::pow(0.7, static_cast<double>(one.t + 1)) <= std::log(2.0));
    CHECK(std::pow(0.7, static_cast<double>(one.t)) > std::log(2.0));

    CHECK_THROWS_AS(solve_parallel_params(0.1, 2, 1.0), Error);
    CHECK_THROWS_AS(solve_parallel_params(0.5, 2, 2.0), Error);
}

TEST_CASE("parallel parameters: r, gamma monotonicity, growth and the survival identity", "[truncated]") {
    for (double d : {2.0, 3.0, 5.0, 10.0, 40.0})
        for (double alpha : {1.05, 1.3, 2.0, 2.5, std::numbers::e}) {
            const double p = alpha / (std::numbers::e * d);
            auto pp = solve_parallel_params(p, d, alpha);
            CHECK(pp.r >= alpha / (std::numbers::e * d) * (1 - 1e-12));
            CHECK(pp.lambda >= 1.0 - 1e-12);
            for (double b = 0.0; b <= 1.0; b += 0.05)
                for (std::uint64_t i = 0; i < pp.t + 2; ++i) CHECK(pp.gamma_at(b, i + 1) >= pp.gamma_at(b, i));
            for (std::uint64_t t = 1; t <= pp.t + 1; ++t)
                CHECK(pp.gamma_at(1.0, t) >= pp.r * std::pow(pp.lambda, static_cast<double>(t - 1)) * (1 - 1e-12));
            CHECK(std::abs(pp.gamma[pp.t] - pp.z) <= std::ldexp(1.0, -40));
            if (pp.beta > 0.0) {
                const double s = pp.gamma[pp.t + 1] / pp.beta - pp.gamma[pp.t];
                CHECK(s == Approx(std::log(alpha) / d).epsilon(1e-6));
            }
        }
}

TEST_CASE("gamma table solves the sigma recurrence on a symmetric ring", "[truncated]") {
    auto in = symmetric_ring(14, 2, 2.0);
    DependencyGraph g(in.family, in.space.size());
    auto pp = solve_parallel_params(in.family[0].prob, 3, 2.0);
    std::vector<double> q(in.family.size(), pp.beta);
    std::vector<std::vector<double>> sigma;
    for (double gi : pp.gamma) sigma.emplace_back(in.family.size(), gi);
    auto sc = check_sigma_recurrence(in.family, g, q, sigma);
    CHECK(sc.satisfied);
    for (double s : sc.survival_bound) CHECK(s <= std::log(2.0) / 3 + 1e-9);
    // Shrinking the top level breaks the recurrence.
    for (auto& v : sigma.back()) v *= 0.5;
    CHECK_FALSE(check_sigma_recurrence(in.family, g, q, sigma).satisfied);
}

TEST_CASE("parallel runs: zero rounds, beta = 0 and independent rounds", "[truncated]") {
    auto in = symmetric_ring(16, 2, 2.0);
    DependencyGraph g(in.family, in.space.size());
    auto pp = solve_parallel_params(in.family[0].prob, 3, 2.0);
    auto r0 = run_parallel_truncated(in.space, in.family, pp, 4, 0);
    CHECK(r0.config == sample_initial(in.space, 4));
    CHECK(r0.rounds.empty());

    auto zero = pp;
    zero.beta = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) CHECK(run_parallel_truncated(in.space, in.family, zero, s).resamplings == 0);

    for (std::uint64_t s = 0; s < 300; ++s) {
        auto r = run_parallel_truncated(in.space, in.family, pp, s);
        CHECK(r.rounds.size() == pp.t);
        for (const auto& round : r.rounds)
            for (std::size_t a = 0; a < round.size(); ++a)
                for (std::size_t b = a + 1; b < round.size(); ++b) CHECK_FALSE(g.dependent(round[a], round[b]));
    }
}

TEST_CASE("greedy independent set is independent and maximal", "[truncated]") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto in = random_instance(seed, {.vars = 10, .events = 14, .need_criterion = false});
        DependencyGraph g(in.family, in.space.size());
        CounterRng rng(seed, 3);
        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < in.family.size(); ++i)
            if (rng.bernoulli(0.6)) cand.push_back(i);
        auto mis = greedy_mis(cand, g);
        for (std::size_t a = 0; a < mis.size(); ++a)
            for (std::size_t b = a + 1; b < mis.size(); ++b) CHECK_FALSE(g.dependent(mis[a], mis[b]));
        for (auto c : cand) {
            bool covered = false;
            for (auto s : mis) covered |= g.dependent(c, s);
            CHECK(covered);
        }
    }
}

TEST_CASE("parallel truncated survival on d = 3, alpha = 2", "[truncated][mc]") {
    auto in = symmetric_ring(20, 2, 2.0);
    auto pp = solve_parallel_params(in.family[0].prob, 3, 2.0);
    auto rep = mc_run({"survive"}, 20000, 12, [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
        auto r = run_parallel_truncated(in.space, in.family, pp, rng);
        out[0] = std::find(r.survivors.begin(), r.survivors.end(), 0) != r.survivors.end();
    });
    const double bound = std::log(2.0) / 3;
    const double f = rep.stats[0].mean;
    CHECK(within_upper(f, bound, bernoulli_sigma(f, bound, rep.trials)));
}
