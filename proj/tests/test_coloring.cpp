#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "lll/apps/hypergraph.hpp"
#include "lll/apps/ramsey.hpp"
#include "lll/oracle.hpp"
#include "lll/stats.hpp"

using namespace lll;
using Catch::Approx;

namespace {

EdgeColoring random_coloring(std::size_t n, std::uint64_t seed) {
    EdgeColoring g(n);
    CounterRng rng(seed, 1);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) g.set(static_cast<int>(u), static_cast<int>(v), static_cast<int>(rng.below(2)));
    return g;
}

}  // namespace

TEST_CASE("ramsey n from k", "[ramsey]") {
    CHECK(ramsey_n(5) == 15);
    CHECK(ramsey_n(3) == 5);
    CHECK(ramsey_n(4) == static_cast<std::size_t>(std::ceil(std::numbers::sqrt2 / std::numbers::e * 4 * 4)));
}

TEST_CASE("mono clique examples", "[ramsey]") {
    EdgeColoring k3(3);
    auto all = find_mono_cliques(k3, 3);
    REQUIRE(all.size() == 1);
    CHECK(all[0] == std::vector<int>{0, 1, 2});
    k3.set(0, 2, 1);
    CHECK(find_mono_cliques(k3, 3).empty());
}

TEST_CASE("branching clique search equals subset enumeration", "[ramsey]") {
    for (std::uint64_t s = 0; s < 60; ++s) {
        auto g = random_coloring(10, s);
        for (std::size_t k : {3u, 4u, 5u}) {
            auto fast = find_mono_cliques(g, k);
            CHECK(fast == all_mono_cliques(g, k));
            for (int a = 0; a < 10; a += 3)
                for (int b = a + 1; b < 10; b += 4) {
                    auto near = find_mono_cliques_with(g, k, a, b);
                    std::sort(near.begin(), near.end());
                    std::vector<std::vector<int>> expect;
                    for (const auto& q : fast)
                        if (std::count(q.begin(), q.end(), a) && std::count(q.begin(), q.end(), b)) expect.push_back(q);
                    CHECK(near == expect);
                }
        }
    }
}

TEST_CASE("ramsey runs produce clique-free colorings", "[ramsey]") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto r = run_ramsey(5, s);
        CHECK(r.coloring.n == 15);
        CHECK(check_clique_free(r.coloring, 5).pass);
    }
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto r = run_ramsey(3, s);
        CHECK(r.coloring.n == 5);
        CHECK(check_clique_free(r.coloring, 3).pass);
    }
    auto a = run_ramsey(5, 9), b = run_ramsey(5, 9);
    CHECK(a.coloring.colors == b.coloring.colors);
    CHECK(a.resamplings == b.resamplings);
    CHECK_THROWS_AS(run_ramsey(5, 1, {.n = 60, .cap = 3}), Error);
}

TEST_CASE("hypergraph parameters", "[hypergraph]") {
    auto p = hyp_params(8, 85);
    CHECK(p.R == Approx(std::log(8.0) / 16));
    CHECK(p.p1 == Approx(0.00128).margin(5e-6));
    CHECK(std::abs(p.p1 - hyp_p1_grid(8)) <= 1e-6);
    CHECK(std::abs(hyp_params(3, 1).p1 - std::pow(1 - std::log(3.0) / 6, 3) / 8) <= 1e-12);
    CHECK(std::abs(hyp_params(3, 1).p1 - hyp_p1_grid(3)) <= 1e-6);
    CHECK(p.p2 <= p.p2_bound);
    CHECK(p.p2 >= p.p2_bound * std::pow(1 - p.R * p.R, 7.0));
    CHECK(p.L_max == Approx(0.17 * std::sqrt(8 / std::log(8.0)) * 256));
    CHECK(p.L_ok);
    // At k = 8 the product bound on t is about 1.96, above sqrt(e).
    CHECK(p.t_bound == Approx(std::exp(2 * 85 * std::sqrt(std::numbers::e) * p.p1 +
                                       4 * 85.0 * 85 * std::numbers::e * p.p2)));
    CHECK_FALSE(p.criterion_ok);
    CHECK(hyp_params(30, 1000).criterion_ok);
}

TEST_CASE("hypergraph event probabilities by sampling", "[hypergraph][mc]") {
    // Two 3-edges meeting in vertex 2.
    HypInstance h(5, 3);
    h.add_edge({0, 1, 2});
    h.add_edge({2, 3, 4});
    const auto p = hyp_params(3, 2);
    auto rep = mc_run({"single", "pair"}, 400000, 17, [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
        HypState st(h, p.R);
        st.randomize(rng);
        out[0] = st.holds({0, -1, 0});
        out[1] = st.holds({0, 1, 0});
    });
    CHECK(std::abs(rep["single"].mean - p.p1) <= 3 * bernoulli_sigma(rep["single"].mean, p.p1, 400000));
    CHECK(std::abs(rep["pair"].mean - p.p2) <= 3 * bernoulli_sigma(rep["pair"].mean, p.p2, 400000));
}

TEST_CASE("flip pass fails only when a bad event holds", "[hypergraph]") {
    std::uint64_t failures = 0, trials = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
        auto h = random_hypergraph(14, 12 + s % 8, 3, 6, s);
        const auto p = hyp_params(3, h.max_neighborhood());
        for (std::uint64_t r = 0; r < 500; ++r) {
            CounterRng rng(s, r);
            HypState st(h, p.R);
            st.randomize(rng);
            auto out = flip_pass(h, st.color, st.rank);
            ++trials;
            if (find_mono_edge(h, out) < 0) continue;
            ++failures;
            std::vector<HypEvent> ev;
            for (std::size_t f = 0; f < h.m(); ++f)
                if (st.edge_mono(static_cast<int>(f))) st.events_from(static_cast<int>(f), ev);
            CHECK_FALSE(ev.empty());
        }
    }
    CHECK(failures > 100);  // the property is actually exercised
    CHECK(failures < trials);
}

TEST_CASE("monochromatic edge lists track recoloring", "[hypergraph]") {
    auto h = random_hypergraph(40, 60, 4, 8, 3);
    HypState st(h, hyp_params(4, h.max_neighborhood()).R);
    CounterRng rng(3, 0);
    st.randomize(rng);
    CHECK(st.audit());
    for (int step = 0; step < 2000; ++step) {
        const auto v = rng.below(h.n);
        st.draw(v, rng);
        for (int f : h.incident[v]) st.refresh(f);
        if (step % 50 == 0) REQUIRE(st.audit());
    }
    CHECK(st.audit());
    // A stale list is caught.
    st.color[0] ^= 1;
    bool stale = false;
    for (int f : h.incident[0]) stale = stale || st.edge_mono(f) != (std::count(st.mono_at(0).begin(), st.mono_at(0).end(), f) == 1);
    if (stale) CHECK_FALSE(st.audit());
}

TEST_CASE("single edge is always fixed", "[hypergraph]") {
    HypInstance h(4, 4);
    h.add_edge({0, 1, 2, 3});
    for (std::uint64_t s = 0; s < 1000; ++s) {
        auto r = run_hyp2col(h, s);
        CHECK(r.used_shortcut);
        CHECK(check_hyp2col(h, r.coloring).pass);
        auto m = run_hyp2col(h, s, {.shortcut = false});
        CHECK(check_hyp2col(h, m.coloring).pass);
    }
}

TEST_CASE("k = 8 hypergraphs are two-colored", "[hypergraph]") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto h = random_hypergraph(1700, 2000, 8, 10, s);
        REQUIRE(h.max_neighborhood() <= 85);
        auto r = run_hyp2col(h, s, {.audit = true});
        CHECK_FALSE(r.used_shortcut);
        CHECK(check_hyp2col(h, r.coloring).pass);
        CHECK(r.audits == r.resamplings);
    }
}
