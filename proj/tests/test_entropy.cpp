#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <numbers>

#include "lll/engine.hpp"
#include "lll/entropy.hpp"
#include "lll/instances.hpp"
#include "lll/stats.hpp"

using namespace lll;
using Catch::Approx;

namespace {

// Brute-force ln of the independence polynomial over the whole family.
double brute_log_polynomial(const BadEventFamily& fam, const std::vector<double>& mu, const DependencyGraph& g) {
    const std::size_t m = fam.size();
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) {
        double w = 1.0;
        bool ok = true;
        for (std::size_t a = 0; a < m && ok; ++a) {
            if (!(mask >> a & 1)) continue;
            w *= mu[a];
            for (std::size_t b = a + 1; b < m; ++b)
                if ((mask >> b & 1) && g.dependent(a, b)) ok = false;
        }
        if (ok) total += w;
    }
    return std::log(total);
}

// k blocks of b vertices; random cross-block edges keeping every degree <= delta.
struct Transversal {
    ProductSpace space;
    BadEventFamily family;
};

Transversal transversal_instance(std::size_t k, std::size_t b, std::size_t delta, std::uint64_t seed) {
    Transversal t;
    t.space = ProductSpace::uniform(k, b);
    std::vector<std::size_t> deg(k * b, 0);
    CounterRng rng(seed, 0);
    for (std::size_t tries = 0; tries < 20 * k * b * delta; ++tries) {
        const auto u = rng.below(k * b), v = rng.below(k * b);
        if (u / b == v / b || deg[u] >= delta || deg[v] >= delta) continue;
        ++deg[u];
        ++deg[v];
        const auto bu = u / b, bv = v / b;
        const int iu = static_cast<int>(u % b), iv = static_cast<int>(v % b);
        BadEvent e;
        e.scope = {std::min(bu, bv), std::max(bu, bv)};
        const int first = bu < bv ? iu : iv, second = bu < bv ? iv : iu;
        e.predicate = [first, second](std::span<const int> x) { return x[0] == first && x[1] == second; };
        e.prob = 1.0 / static_cast<double>(b * b);
        t.family.add(e);
    }
    return t;
}

}  // namespace

TEST_CASE("renyi examples", "[entropy]") {
    std::vector<double> u(8, 0.125);
    for (double rho : {1.5, 2.0, 7.0, kRhoInfinity}) CHECK(renyi(u, rho) == Approx(std::log(8.0)));
    std::vector<double> point{0.0, 1.0, 0.0};
    CHECK(renyi(point, 2.0) == Approx(0.0).margin(1e-15));
    CHECK(renyi(point, kRhoInfinity) == Approx(0.0).margin(1e-15));
    std::vector<double> skew{0.75, 0.25};
    CHECK(renyi(skew, kRhoInfinity) == Approx(0.28768).margin(1e-5));
    CHECK(renyi(skew, 2.0) == Approx(-std::log(0.625)));
    CHECK_THROWS_AS(renyi(skew, 1.0), Error);
    CHECK_THROWS_AS(renyi(skew, 0.5), Error);
    std::vector<double> bad{0.5, 0.4};
    CHECK_THROWS_AS(renyi(bad, 2.0), Error);
}

TEST_CASE("renyi is nonincreasing in rho and additive over products", "[entropy]") {
    CounterRng rng(5, 0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> p(2 + rng.below(6));
        double s = 0.0;
        for (auto& x : p) s += (x = rng.uniform() + 0.01);
        for (auto& x : p) x /= s;
        double prev = std::numeric_limits<double>::infinity();
        for (double rho : {1.01, 1.5, 2.0, 3.0, 10.0, 100.0, kRhoInfinity}) {
            const double h = renyi(p, rho);
            CHECK(h <= prev + 1e-12);
            prev = h;
        }
    }
    ProductSpace sp({{0.5, 0.5}, {0.2, 0.3, 0.5}});
    std::vector<double> joint;
    for (double a : sp.probs(0))
        for (double b : sp.probs(1)) joint.push_back(a * b);
    for (double rho : {2.0, 3.5, kRhoInfinity}) CHECK(renyi(sp, rho) == Approx(renyi(joint, rho)).epsilon(1e-12));
}

TEST_CASE("distortion examples", "[entropy]") {
    BadEventFamily none;
    auto d0 = distortion_bounds(none, {}, 3);
    CHECK(d0.exact == 0.0);
    CHECK(d0.crude == 0.0);
    CHECK(d0.variable_based == 0.0);

    BadEventFamily one;
    BadEvent e;
    e.scope = {0, 1};
    e.prob = 0.25;
    e.predicate = [](std::span<const int> v) { return v[0] == 1 && v[1] == 1; };
    one.add(e);
    auto d1 = distortion_bounds(one, {3.0}, 2);
    CHECK(d1.exact == Approx(std::log(4.0)));
    CHECK(d1.crude == 3.0);
    CHECK(d1.variable_based == Approx(std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("exact distortion is below both bounds on random instances", "[entropy]") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto in = random_instance(seed, {.vars = 9, .events = 4 + seed % 9, .need_criterion = false});
        CounterRng rng(seed, 9);
        std::vector<double> mu(in.family.size());
        for (auto& m : mu) m = 1.5 * rng.uniform();
        DependencyGraph g(in.family, in.space.size());
        auto db = distortion_bounds(in.family, mu, in.space.size());
        REQUIRE(db.has_exact);
        CHECK(db.exact == Approx(brute_log_polynomial(in.family, mu, g)).epsilon(1e-12));
        CHECK(db.exact <= db.crude + 1e-12);
        CHECK(db.exact <= db.variable_based + 1e-12);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("entropy bound examples", "[entropy]") {
    auto sp = ProductSpace::uniform(3, 4);
    BadEventFamily none;
    auto eb = mt_entropy_bound(sp, none, {}, kRhoInfinity);
    CHECK(eb.bound == Approx(3 * std::log(4.0)));
    CHECK(eb.count_bound == Approx(64.0));

    auto bsp = ProductSpace::bernoulli({0.3, 0.6});
    BadEventFamily one;
    BadEvent e;
    e.scope = {0, 1};
    e.prob = 0.18;
    e.predicate = [](std::span<const int> v) { return v[0] == 1 && v[1] == 1; };
    one.add(e);
    const double mu = 0.18 / 0.82;  // least fixed point of mu = p (1 + mu)
    auto b1 = mt_entropy_bound(bsp, one, {mu * (1 + 1e-12)}, kRhoInfinity);
    CHECK(b1.distortion_source == "exact");
    CHECK(b1.bound == Approx(renyi(bsp, kRhoInfinity) - std::log1p(mu)).epsilon(1e-9));
    auto b2 = mt_entropy_bound(bsp, one, {mu * (1 + 1e-12)}, 2.0);
    CHECK(b2.bound == Approx(renyi(bsp, 2.0) - 2.0 * std::log1p(mu)).epsilon(1e-9));
    CHECK(b2.bound <= b2.base_entropy);
    CHECK_THROWS_AS(mt_entropy_bound(bsp, one, {0.1}, 2.0), Error);
}

TEST_CASE("independent transversal min-entropy", "[entropy]") {
    // At b = 4 delta the closed form is k ln(2b/3).
    for (double delta : {1.0, 2.0, 5.0}) {
        const double b = 4 * delta;
        CHECK(transversal_min_entropy(10, b, delta) == Approx(10 * std::log(2 * b / 3)));
        CHECK(transversal_min_entropy(10, b, delta) == Approx(10 * (std::log(b) - std::log(1.5))));
    }
    CHECK_THROWS_AS(transversal_min_entropy(10, 3, 1), Error);

    // On built instances the per-variable bound with the exact weights is at
    // least as strong as the closed form.
    for (auto [k, b, delta] : std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>{
             {12, 4, 1}, {10, 8, 2}, {8, 12, 3}, {10, 20, 2}}) {
        auto t = transversal_instance(k, b, delta, k * 100 + b);
        const double mu = transversal_mu(static_cast<double>(b), static_cast<double>(delta));
        std::vector<double> mus(t.family.size(), mu);
        DependencyGraph g(t.family, k);
        CHECK(check_pegden(t.family, g, mus).satisfied);
        auto eb = mt_entropy_bound(t.space, t.family, mus, kRhoInfinity);
        CHECK(eb.base_entropy == Approx(static_cast<double>(k) * std::log(static_cast<double>(b))));
        CHECK(eb.bound >= transversal_min_entropy(static_cast<double>(k), static_cast<double>(b),
                                                  static_cast<double>(delta)) - 1e-9);
    }
}

TEST_CASE("biased k-SAT entropy formula is a valid lower bound", "[entropy]") {
    for (double k : {3.0, 4.0, 6.0, 10.0})
        for (double alpha : {1.0, 1.3, 2.0, 2.5}) {
            auto ke = ksat_entropy(100, 400, k, alpha);
            CHECK(ke.beta == Approx(1 - std::log(alpha)));
            const double w = ke.beta / (2 * k);
            std::vector<double> bern{0.5 + w, 0.5 - w};
            const double direct = renyi(bern, ke.rho) - rho_factor(ke.rho) * 2 * ke.beta / (k * k);
            CHECK(direct >= ke.per_var - 1e-12);
            CHECK(ke.entropy == Approx(100 * ke.per_var));
            CHECK(ke.per_var <= std::log(2.0));
        }
    auto e = ksat_entropy(10, 10, 4, std::numbers::e);
    CHECK(e.beta == Approx(0.0).margin(1e-15));
    CHECK(e.per_var == Approx(std::log(2.0)));
}

TEST_CASE("max output frequency respects the min-entropy bound", "[entropy][mc]") {
    // Six binary variables: 64 outcomes.
    auto sp = ProductSpace::bernoulli({0.3, 0.5, 0.4, 0.6, 0.5, 0.3});
    BadEventFamily fam;
    fam.add(make_event(sp, {0, 1}, [](std::span<const int> v) { return v[0] == 1 && v[1] == 1; }));
    fam.add(make_event(sp, {1, 2, 3}, [](std::span<const int> v) { return v[0] == 0 && v[1] == 1 && v[2] == 1; }));
    fam.add(make_event(sp, {3, 4}, [](std::span<const int> v) { return v[0] == 1 && v[1] == 0; }));
    fam.add(make_event(sp, {0, 5}, [](std::span<const int> v) { return v[0] == 0 && v[1] == 1; }));
    DependencyGraph g(fam, sp.size());
    std::vector<double> mu;
    REQUIRE(solve_minimal_mu(fam, g, mu));
    for (auto& m : mu) m *= 1 + 1e-12;
    auto eb = mt_entropy_bound(sp, fam, mu, kRhoInfinity);
    const double top = std::exp(-eb.bound);

    const std::uint64_t trials = 200000;
    std::vector<std::string> names;
    for (int v = 0; v < 64; ++v) names.push_back(std::to_string(v));
    auto rep = mc_run(names, trials, 31, [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
        auto r = run_mt(sp, fam, rng, {.record_log = false});
        int code = 0;
        for (std::size_t i = 0; i < 6; ++i) code |= r.config[i] << i;
        std::fill(out.begin(), out.end(), 0.0);
        out[static_cast<std::size_t>(code)] = 1.0;
    });
    double fmax = 0.0;
    for (const auto& s : rep.stats) fmax = std::max(fmax, s.mean);
    CHECK(within_upper(fmax, top, bernoulli_sigma(fmax, top, trials)));
}
