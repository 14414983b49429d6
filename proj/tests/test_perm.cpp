#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "lll/apps/latin.hpp"
#include "lll/oracle.hpp"
#include "lll/stats.hpp"

using namespace lll;
using Catch::Approx;

namespace {

// Direct count of same-color cell pairs in distinct rows and columns.
std::uint64_t count_pairs(const ColorMatrix& m) {
    std::uint64_t c = 0;
    const std::size_t N = m.n * m.n;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j)
            if (m.cells[i] == m.cells[j] && i / m.n != j / m.n && i % m.n != j % m.n) ++c;
    return c;
}

}  // namespace

TEST_CASE("color matrix construction", "[perm]") {
    auto m = ColorMatrix::from_rows({{7, 7}, {3, 9}});
    CHECK(m.colors == 3);
    CHECK(m.delta == 2);
    CHECK(m.at(1, 1) == 2);
    CHECK_THROWS_AS(ColorMatrix::from_rows({{1, 2}, {3}}), Error);
    auto r = random_color_matrix(20, 3, 4);
    CHECK(r.delta == 3);
    CHECK(r.colors == 134);
    CHECK(latin_threshold(16) == Approx(1.6875));
    CHECK(latin_threshold(64) == Approx(6.75));
}

TEST_CASE("distinct colors need no resampling", "[perm]") {
    auto m = random_color_matrix(16, 1, 1);
    REQUIRE(m.delta == 1);
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto r = run_latin(m, s);
        CHECK(r.resamplings == 0);
        CHECK(check_transversal(m.rows(), r.pi).pass);
    }
}

TEST_CASE("full transversals at n = 64, delta = 6", "[perm]") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto m = random_color_matrix(64, 6, 100 + s);
        auto r = run_latin(m, s, {.audit = true});
        CHECK(r.audits == r.resamplings);
        CHECK(check_transversal(m.rows(), r.pi).pass);
        CHECK(r.length == 64);
    }
    auto dense = random_color_matrix(64, 7, 1);
    CHECK_THROWS_AS(run_latin(dense, 1), Error);
}

TEST_CASE("hash collisions occur at rate about 1/n", "[perm]") {
    const std::size_t n = 50;
    const std::uint64_t trials = 200000;
    CounterRng rng(8, 0);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto h = PairwiseHash::draw(n, rng);
        hits += h(3) == h(1000003);
    }
    const double f = static_cast<double>(hits) / trials;
    CHECK(std::abs(f - 1.0 / n) <= 4 * std::sqrt((1.0 / n) / trials));
}

TEST_CASE("coordinate counts match a direct pair count", "[perm]") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const std::size_t n = 8 + s, delta = 2 + s % 3;
        auto m = random_color_matrix(n, delta, s);
        auto cc = coordinate_counts(m);
        CHECK(cc.events == count_pairs(m));
        CHECK(cc.events <= n * n * (static_cast<std::uint64_t>(m.delta) - 1) / 2);
        std::uint64_t rows = 0;
        for (auto r : cc.row) rows += r;
        CHECK(rows == 2 * cc.events);
    }
}

TEST_CASE("partial bounds", "[perm]") {
    CHECK(partial_latin_bound(60, 0.25) == Approx(52.5));
    CHECK(partial_latin_bound(80, 0.25) == Approx(0.875 * 80));
    CHECK(partial_latin_bound(100, 27.0 / 256) == Approx(100.0));
    CHECK(partial_latin_bound(100, 0.05) == 100.0);
    CHECK(partial_latin_bound(100, 0.2) < 100.0);
    CHECK(stein_bound(60, 1.0) == Approx(60 * (1 - std::exp(-1.0))));
    auto wide = random_color_matrix(20, 6, 2);
    CHECK_THROWS_AS(run_partial_latin(wide, 1), Error);
}

TEST_CASE("stein baseline meets its bound", "[perm][mc]") {
    auto m = random_color_matrix(60, 60, 3);
    REQUIRE(m.delta == 60);
    std::vector<double> len;
    for (std::uint64_t s = 0; s < 500; ++s) len.push_back(static_cast<double>(stein_baseline(m, s).length));
    auto st = summarize("len", len);
    CHECK(within_lower(st.mean, stein_bound(60, 1.0), st.sem));
}

TEST_CASE("partial transversals meet the bound", "[perm][mc]") {
    auto m = random_color_matrix(60, 15, 5);
    REQUIRE(m.delta == 15);
    std::vector<double> len;
    for (std::uint64_t s = 0; s < 500; ++s) {
        auto r = run_partial_latin(m, s, {.audit = s < 20});
        // Active cells use distinct colors.
        std::set<int> colors;
        for (std::size_t x = 0; x < 60; ++x)
            if (r.active[x]) CHECK(colors.insert(m.at(x, static_cast<std::size_t>(r.pi[x]))).second);
        CHECK(r.max_w <= 64.0);
        len.push_back(static_cast<double>(r.length));
    }
    auto st = summarize("len", len);
    CHECK(within_lower(st.mean, 52.5, st.sem));
}
