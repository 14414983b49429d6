#include <catch_amalgamated.hpp>

#include <cmath>

#include "lll/apps/ksat.hpp"
#include "lll/stats.hpp"

using namespace lll;
using Catch::Approx;

namespace {

// Clauses sharing a variable with opposite signs, found by walking variables.
bool naive_conflict(const CnfInstance& inst, std::size_t a, std::size_t b) {
    for (std::size_t v = 1; v <= inst.n; ++v) {
        int sa = 0, sb = 0;
        for (int lit : inst.clauses[a])
            if (static_cast<std::size_t>(std::abs(lit)) == v) sa = lit > 0 ? 1 : -1;
        for (int lit : inst.clauses[b])
            if (static_cast<std::size_t>(std::abs(lit)) == v) sb = lit > 0 ? 1 : -1;
        if (sa != 0 && sa == -sb) return true;
    }
    return false;
}

// Expected satisfied count of the lowest-index truncated chain, by value
// iteration over (assignment, marks).
double exact_expected_satisfied(const KsatSetup& s) {
    const std::size_t n = s.inst.n, m = s.inst.m(), N = n + m;
    std::vector<double> p1(N);
    for (std::size_t v = 0; v < N; ++v) p1[v] = s.augmented.space.prob(v, 1);
    auto bit = [](std::size_t st, std::size_t v) { return static_cast<int>(st >> v & 1); };
    auto falsified = [&](std::size_t st, std::size_t c) {
        for (int lit : s.inst.clauses[c])
            if (bit(st, static_cast<std::size_t>(std::abs(lit) - 1)) == (lit > 0)) return false;
        return true;
    };
    const std::size_t S = std::size_t(1) << N;
    std::vector<int> pick(S, -1);
    std::vector<double> value(S, 0.0);
    for (std::size_t st = 0; st < S; ++st) {
        for (std::size_t c = 0; c < m && pick[st] < 0; ++c)
            if (falsified(st, c) && bit(st, n + c)) pick[st] = static_cast<int>(c);
        if (pick[st] < 0) {
            std::size_t sat = 0;
            for (std::size_t c = 0; c < m; ++c) sat += !falsified(st, c);
            value[st] = static_cast<double>(sat);
        }
    }
    for (int iter = 0; iter < 100000; ++iter) {
        double change = 0.0;
        for (std::size_t st = 0; st < S; ++st) {
            if (pick[st] < 0) continue;
            const auto c = static_cast<std::size_t>(pick[st]);
            std::vector<std::size_t> vars;
            for (int lit : s.inst.clauses[c]) vars.push_back(static_cast<std::size_t>(std::abs(lit) - 1));
            vars.push_back(n + c);
            double acc = 0.0;
            for (std::size_t mask = 0; mask < (std::size_t(1) << vars.size()); ++mask) {
                std::size_t to = st;
                double w = 1.0;
                for (std::size_t j = 0; j < vars.size(); ++j) {
                    const bool one = mask >> j & 1;
                    to = one ? (to | std::size_t(1) << vars[j]) : (to & ~(std::size_t(1) << vars[j]));
                    w *= one ? p1[vars[j]] : 1.0 - p1[vars[j]];
                }
                acc += w * value[to];
            }
            change = std::max(change, std::abs(acc - value[st]));
            value[st] = acc;
        }
        if (change < 1e-14) break;
    }
    double e = 0.0;
    for (std::size_t st = 0; st < S; ++st) {
        double w = 1.0;
        for (std::size_t v = 0; v < N; ++v) w *= bit(st, v) ? p1[v] : 1.0 - p1[v];
        e += w * value[st];
    }
    return e;
}

CnfInstance tiny() {
    CnfInstance inst;
    // Width 4 over four variables: L = 6 is within 7.5 at alpha = e.
    inst.n = 4;
    inst.k = 4;
    inst.clauses = {{1, 2, 3, 4},  {-1, 2, -3, 4}, {1, -2, 3, -4},
                    {-1, -2, 3, 4}, {1, 2, -3, -4}, {-1, -2, -3, -4}};
    return inst;
}

}  // namespace

TEST_CASE("bias parameters", "[sat]") {
    CnfInstance inst;
    inst.n = 4;
    inst.k = 3;
    // Variable 1 occurs four times positively, variable 2 twice each way.
    inst.clauses = {{1, 2, 3}, {1, -2, 4}, {1, 2, -3}, {1, -2, 3}};
    auto b = bias_params(inst, std::numbers::e);
    CHECK(b.L == 4);
    CHECK(b.z == Approx(2 * std::log(16.0 / 14.0) / 14.0).epsilon(1e-14));
    CHECK(b.z == Approx(0.019074).margin(5e-6));
    CHECK(b.x == Approx(0.038148).margin(1e-5));
    CHECK(b.x == Approx(2 * b.z));
    CHECK(b.p_true[1] == 0.5);
    CHECK(b.p_true[0] == Approx(0.5 - b.x / 2));
    CHECK(b.p_true[3] == Approx(0.5 - b.x / 2));
    CHECK_THROWS_AS(bias_params(inst, 0.5), Error);
    CHECK_THROWS_AS(bias_params(inst, 3.0), Error);
    // L = 4 needs alpha >= 4.667 * 3e / 16.
    CHECK_THROWS_AS(bias_params(inst, 2.0), Error);
    CHECK(ksat_max_L(4, 2.0) == Approx(64 / (4 * std::numbers::e) - 0.5));
    CHECK(ksat_bound(500, 4, 2.0) == Approx(500 * (1 - 0.0625 * std::numbers::e * std::log(2.0) / 2)));
    CHECK(ksat_bound(1, 4, 2.0) == Approx(0.94112).margin(1e-4));
}

TEST_CASE("width and distinct-variable invariants", "[sat]") {
    CnfInstance inst;
    inst.n = 3;
    inst.k = 2;
    inst.clauses = {{1, -1}};
    CHECK_THROWS_AS(inst.validate(), Error);
    inst.clauses = {{1, 2, 3}};
    CHECK_THROWS_AS(inst.validate(), Error);
    inst.clauses = {{1, 4}};
    CHECK_THROWS_AS(inst.validate(), Error);
    auto r = random_ksat(400, 500, 4, 5, 9);
    CHECK(r.max_occurrence() <= 5);
    CHECK(r.m() == 500);
}

TEST_CASE("lopsided relation matches a naive scan", "[sat]") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto inst = random_ksat(40, 50, 4, 5, seed);
        auto s = ksat_setup(inst, 2.0);
        DependencyGraph g(s.family, inst.n);
        for (std::size_t a = 0; a < inst.m(); ++a)
            for (std::size_t b = 0; b < inst.m(); ++b) {
                if (a == b) continue;
                CHECK(g.dependent(a, b) == naive_conflict(inst, a, b));
                CHECK(g.dependent(a, b) == g.dependent(b, a));
            }
    }
}

TEST_CASE("alpha = 1 satisfies every clause", "[sat]") {
    // 2^6/(5e) - 2/5 = 4.31: L = 4 is allowed.
    auto inst = random_ksat(40, 32, 5, 4, 4);
    auto s = ksat_setup(inst, 1.0);
    for (double q : s.marks.q) CHECK(q == 1.0);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        CounterRng rng(seed, 0);
        CHECK(run_partial_ksat(s, rng).falsified == 0);
    }
}

TEST_CASE("few clauses take the shortcut", "[sat]") {
    CnfInstance inst;
    inst.n = 6;
    inst.k = 4;
    inst.clauses = {{1, 2, 3, 4}, {-1, -2, 5, 6}, {3, -4, -5, 6}};
    auto s = ksat_setup(inst, 2.0);
    CHECK(s.shortcut);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        CounterRng rng(seed, 0);
        auto r = run_partial_ksat(s, rng);
        CHECK(r.falsified == 0);
        CHECK(inst.count_satisfied(r.assignment) == 3);
    }
}

TEST_CASE("k = 4, alpha = 2 meets the bound and the resampling budget", "[sat][mc]") {
    auto inst = random_ksat(160, 200, 4, 5, 17);
    auto s = ksat_setup(inst, 2.0);
    CHECK(s.bias.L == 5);
    CHECK(s.bias.z == Approx(2 * std::log(32.0 / 22.0) / 22.0));
    auto rep = mc_run({"sat", "resamplings"}, 2000, 3, [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
        auto r = run_partial_ksat(s, rng);
        out[0] = static_cast<double>(r.satisfied);
        out[1] = static_cast<double>(r.resamplings);
    });
    CHECK(within_lower(rep["sat"].mean, s.bound, rep["sat"].sem));
    CHECK(within_upper(rep["resamplings"].mean, 200 * s.bias.z, rep["resamplings"].sem));
}

TEST_CASE("tiny instance matches the exact chain", "[sat][mc]") {
    auto inst = tiny();
    auto s = ksat_setup(inst, std::numbers::e);
    // Six clauses of width 4 would take the uniform-retry shortcut.
    REQUIRE(s.shortcut);
    s.shortcut = false;
    const double exact = exact_expected_satisfied(s);
    CHECK(exact >= s.bound - 1e-9);
    auto rep = mc_run({"sat"}, 200000, 11, [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
        out[0] = static_cast<double>(run_partial_ksat(s, rng, {.rule = SelectionRule::LowestIndex}).satisfied);
    });
    CHECK(std::abs(rep["sat"].mean - exact) <= 3 * rep["sat"].sem + 1e-12);
}
