#pragma once

// Experiment runners shared by the command-line tool and the acceptance
// binary. Each returns a Report; checks carry the pass/fail verdicts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lll/analysis.hpp"
#include "lll/apps/graph.hpp"
#include "lll/apps/hypergraph.hpp"
#include "lll/apps/ksat.hpp"
#include "lll/apps/latin.hpp"
#include "lll/apps/nonrep.hpp"
#include "lll/apps/ramsey.hpp"
#include "lll/engine.hpp"
#include "lll/entropy.hpp"
#include "lll/instances.hpp"
#include "lll/io.hpp"
#include "lll/oracle.hpp"
#include "lll/report.hpp"
#include "lll/stats.hpp"
#include "lll/truncated.hpp"
#include "lll/witness.hpp"

namespace lll {

struct ExperimentConfig {
    std::string instance;  // input file; empty means generated
    std::uint64_t seed = 1;
    std::uint64_t trials = 0;  // 0 picks the experiment default
    unsigned jobs = 1;
    std::optional<double> alpha, rho, eps, beta, p, d, cutoff;
    std::optional<std::size_t> n, m, k, delta, width, max_deg;
    std::optional<int> C;
    std::uint64_t cap = 0;
    std::size_t best_of = 1;
    bool audit = false;
    bool shortcut = true;
    bool verify = true;
    std::string builtin;
};

namespace exp_detail {

template <class T>
T get(const std::optional<T>& o, T fallback) {
    return o ? *o : fallback;
}

inline std::string file_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::ParseError, "cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline Json file_instance(const std::string& path) {
    return {{"source", path}, {"digest", digest(file_text(path))}};
}

inline Json generated_instance(const std::string& spec) { return {{"source", "generated"}, {"generator", spec}, {"digest", digest(spec)}}; }

/// Seed for the instance of trial i when instances are drawn per trial.
inline std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t i) {
    CounterRng r(seed, 0x696e7374ull + i);
    return r.below(std::uint64_t(1) << 62);
}

inline Check all_ok(std::string name, const StatSummary& s, std::string note = "") {
    return {std::move(name), s.n > 0 && s.min == 1.0, s.mean, 1.0, 0.0, std::move(note)};
}

inline Check lower(std::string name, const StatSummary& s, double bound) {
    return {std::move(name), within_lower(s.mean, bound, s.sem), s.mean, bound, s.sem, "mean >= bound - 3 sigma"};
}

inline Check upper(std::string name, const StatSummary& s, double bound) {
    return {std::move(name), within_upper(s.mean, bound, s.sem), s.mean, bound, s.sem, "mean <= bound + 3 sigma"};
}

inline Check upper_freq(std::string name, double f, double bound, std::uint64_t n) {
    const double sig = bernoulli_sigma(f, bound, n);
    return {std::move(name), within_upper(f, bound, sig), f, bound, sig, "frequency <= bound + 3 sigma"};
}

inline void finish(Report& rep, const ExperimentConfig& cfg, std::uint64_t trials, const Stopwatch& sw) {
    rep.seed = cfg.seed;
    rep.trials = trials;
    rep.jobs = cfg.jobs;
    rep.seconds = sw.seconds();
}

}  // namespace exp_detail

inline Report run_latin_experiment(const ExperimentConfig& cfg) {
    using namespace exp_detail;
    Stopwatch sw;
    Report rep;
    rep.experiment = "latin";
    const std::uint64_t trials = cfg.trials ? cfg.trials : 200;
    std::optional<ColorMatrix> fixed;
    const std::size_t n = get(cfg.n, std::size_t{64}), delta = get(cfg.delta, std::size_t{6});
    if (!cfg.instance.empty()) {
        fixed = io::read_color_matrix(cfg.instance);
        rep.instance = file_instance(cfg.instance);
    } else {
        rep.instance = generated_instance("random_color_matrix n=" + std::to_string(n) + " delta=" + std::to_string(delta) +
                                          " per-trial");
    }
    const std::size_t nn = fixed ? fixed->n : n;
    rep.parameters = {{"n", nn}, {"delta", fixed ? static_cast<std::size_t>(fixed->delta) : delta}, {"audit", cfg.audit}};
    rep.bounds = {{"delta_max", latin_threshold(nn)}};
    LatinOptions opt;
    opt.audit = cfg.audit;
    if (cfg.cap) opt.cap = cfg.cap;
    auto mc = mc_run({"verified", "resamplings", "audits_ok", "seconds"}, trials, cfg.seed,
                     [&](CounterRng& rng, std::uint64_t i, std::span<double> out) {
                         const ColorMatrix m = fixed ? *fixed : random_color_matrix(n, delta, instance_seed(cfg.seed, i));
                         Stopwatch t;
                         auto r = run_latin(m, rng, opt);
                         out[3] = t.seconds();
                         out[0] = check_transversal(m.rows(), r.pi).pass;
                         out[1] = static_cast<double>(r.resamplings);
                         out[2] = !opt.audit || r.audits == r.resamplings;
                     },
                     cfg.jobs);
    rep.stats = mc.stats;
    rep.checks.push_back(all_ok("transversals-verified", rep.stat("verified")));
    if (cfg.audit) rep.checks.push_back(all_ok("bucket-audits", rep.stat("audits_ok")));
    finish(rep, cfg, trials, sw);
    return rep;
}

inline Report run_partial_latin_experiment(const ExperimentConfig& cfg, bool stein) {
    using namespace exp_detail;
    Stopwatch sw;
    Report rep;
    rep.experiment = stein ? "stein" : "partial-latin";
    const std::uint64_t trials = cfg.trials ? cfg.trials : 500;
    const std::size_t n = get(cfg.n, std::size_t{60});
    const double beta = get(cfg.beta, stein ? 1.0 : 0.25);
    std::optional<ColorMatrix> fixed;
    std::size_t delta = static_cast<std::size_t>(std::llround(beta * static_cast<double>(n)));
    if (!cfg.instance.empty()) {
        fixed = io::read_color_matrix(cfg.instance);
        rep.instance = file_instance(cfg.instance);
        delta = static_cast<std::size_t>(fixed->delta);
    } else {
        require(delta >= 1 && delta <= n * n, ErrorKind::InvalidArgument, "beta * n must be at least 1");
        rep.instance = generated_instance("random_color_matrix n=" + std::to_string(n) + " delta=" + std::to_string(delta) +
                                          " per-trial");
    }
    const std::size_t nn = fixed ? fixed->n : n;
    const double b = static_cast<double>(delta) / static_cast<double>(nn);
    rep.parameters = {{"n", nn}, {"delta", delta}, {"beta", b}};
    const double bound = stein ? stein_bound(nn, b) : partial_latin_bound(nn, b);
    rep.bounds = {{"mean_length", bound}};
    if (!stein && delta >= 2) {
        rep.parameters["mu"] = partial_latin_alpha(nn, static_cast<int>(delta));
    }
    LatinOptions opt;
    opt.audit = cfg.audit;
    if (cfg.cap) opt.cap = cfg.cap;
    auto mc = mc_run({"length", "survivors", "resamplings", "max_weight"}, trials, cfg.seed,
                     [&](CounterRng& rng, std::uint64_t i, std::span<double> out) {
                         const ColorMatrix m = fixed ? *fixed : random_color_matrix(n, delta, instance_seed(cfg.seed, i));
                         auto r = stein ? stein_baseline(m, rng) : run_partial_latin(m, rng, opt);
                         out[0] = static_cast<double>(r.length);
                         out[1] = static_cast<double>(r.survivors);
                         out[2] = static_cast<double>(r.resamplings);
                         out[3] = r.max_w;
                     },
                     cfg.jobs);
    rep.stats = mc.stats;
    rep.checks.push_back(lower("mean-length", rep.stat("length"), bound));
    finish(rep, cfg, trials, sw);
    return rep;
}

/// Shared driver for nonrep, kthue and rho-similar.
inline Report run_path_experiment(const ExperimentConfig& cfg, const std::string& kind) {
    using namespace exp_detail;
    Stopwatch sw;
    Report rep;
    rep.experiment = kind;
    const std::uint64_t trials = cfg.trials ? cfg.trials : 100;
    const std::size_t delta = get(cfg.delta, std::size_t{3});
    const std::size_t n = get(cfg.n, std::size_t{kind == "nonrep" ? 30u : 20u});
    std::optional<Graph> fixed;
    if (!cfg.instance.empty()) {
        fixed = io::read_graph(cfg.instance);
        rep.instance = file_instance(cfg.instance);
    } else {
        rep.instance = generated_instance("random_bounded n=" + std::to_string(n) + " delta=" + std::to_string(delta) +
                                          " per-trial");
    }
    const double D = fixed ? static_cast<double>(std::max<std::size_t>(1, fixed->max_degree())) : static_cast<double>(delta);
    const unsigned k = static_cast<unsigned>(get(cfg.k, std::size_t{3}));
    const double eps = get(cfg.eps, 0.5), rho = get(cfg.rho, 0.8);
    int C = 0;
    if (kind == "nonrep") {
        auto p = solve_nonrep(D);
        C = p.C;
        rep.parameters = {{"delta", D}, {"phi", p.phi}, {"phi_used", p.phi_used}, {"alpha", p.alpha}, {"beta", p.beta}};
    } else if (kind == "kthue") {
        auto p = solve_kthue(D, k, eps);
        C = p.C;
        rep.parameters = {{"delta", D}, {"k", k}, {"eps", eps}, {"phi", p.phi}, {"alpha", p.alpha}, {"ratio", p.ratio}};
    } else {
        auto p = solve_rho(D, rho);
        C = p.C;
        rep.parameters = {{"delta", D}, {"rho", rho}, {"entropy", p.h}, {"phi", p.phi}, {"alpha", p.alpha}};
    }
    rep.bounds = {{"solver_C", C}};
    if (cfg.C) C = *cfg.C;
    rep.parameters["C"] = C;
    rep.parameters["n"] = fixed ? fixed->n : n;
    rep.parameters["shortcut"] = cfg.shortcut;
    NonRepOptions opt;
    opt.C = C;
    opt.allow_trivial = cfg.shortcut;
    opt.audit_index = cfg.audit;
    if (cfg.cap) opt.cap = cfg.cap;
    auto mc = mc_run({"verified", "resamplings", "trivial", "seconds"}, trials, cfg.seed,
                     [&](CounterRng& rng, std::uint64_t i, std::span<double> out) {
                         const Graph g = fixed ? *fixed : Graph::random_bounded(n, delta, instance_seed(cfg.seed, i));
                         Stopwatch t;
                         NonRepResult r;
                         if (kind == "nonrep") r = run_nonrep(g, rng, opt);
                         else if (kind == "kthue") r = run_kthue(g, k, eps, rng, opt);
                         else r = run_rho_similar(g, rho, rng, opt);
                         out[3] = t.seconds();
                         out[1] = static_cast<double>(r.resamplings);
                         out[2] = r.trivial;
                         if (!cfg.verify) {
                             out[0] = 1.0;
                             return;
                         }
                         if (kind == "nonrep") out[0] = check_nonrepetitive(g, r.coloring).pass;
                         else if (kind == "kthue") out[0] = check_nonrepetitive(g, r.coloring, k, r.checked_length).pass;
                         else out[0] = check_similar_free(g, r.coloring, rho).pass;
                     },
                     cfg.jobs);
    rep.stats = mc.stats;
    rep.checks.push_back(all_ok("outputs-verified", rep.stat("verified"), cfg.verify ? "exhaustive path oracle" : "not verified"));
    finish(rep, cfg, trials, sw);
    return rep;
}

inline Report run_hyp_experiment(const ExperimentConfig& cfg) {
    using namespace exp_detail;
    Stopwatch sw;
    Report rep;
    rep.experiment = "hyp2col";
    const std::uint64_t trials = cfg.trials ? cfg.trials : 100;
    const std::size_t n = get(cfg.n, std::size_t{1700}), m = get(cfg.m, std::size_t{2000}), k = get(cfg.k, std::size_t{8}),
                      max_deg = get(cfg.max_deg, std::size_t{10});
    std::optional<HypInstance> fixed;
    std::size_t L = 0;
    if (!cfg.instance.empty()) {
        fixed = io::read_hypergraph(cfg.instance);
        rep.instance = file_instance(cfg.instance);
        L = fixed->max_neighborhood();
    } else {
        rep.instance = generated_instance("random_hypergraph n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                          " k=" + std::to_string(k) + " max_deg=" + std::to_string(max_deg) + " per-trial");
        L = 1 + k * (max_deg - 1);  // largest possible |N(f)|
    }
    const std::size_t kk = fixed ? fixed->k : k;
    const auto hp = hyp_params(kk, L);
    const double grid = hyp_p1_grid(kk);
    rep.parameters = {{"k", kk},     {"L", L},           {"R", hp.R},   {"p1", hp.p1},
                      {"p2", hp.p2}, {"t", hp.t_bound},  {"L_max", hp.L_max}, {"L_ok", hp.L_ok},
                      {"criterion_ok", hp.criterion_ok}, {"shortcut", cfg.shortcut}};
    rep.bounds = {{"p1_grid", grid}, {"sqrt_e", std::sqrt(std::numbers::e)}, {"small_m", hyp_small_m(kk)}};
    HypOptions opt;
    opt.audit = cfg.audit;
    opt.shortcut = cfg.shortcut;
    if (cfg.cap) opt.cap = cfg.cap;
    std::vector<double> worst_L(trials, 0.0);
    auto mc = mc_run({"verified", "resamplings", "restarts", "audits_ok", "max_neighborhood"}, trials, cfg.seed,
                     [&](CounterRng& rng, std::uint64_t i, std::span<double> out) {
                         const HypInstance h =
                             fixed ? *fixed : random_hypergraph(n, m, k, max_deg, instance_seed(cfg.seed, i));
                         auto r = run_hyp2col(h, rng, opt);
                         out[0] = check_hyp2col(h, r.coloring).pass;
                         out[1] = static_cast<double>(r.resamplings);
                         out[2] = static_cast<double>(r.restarts);
                         out[3] = !opt.audit || r.used_shortcut || r.audits == r.resamplings;
                         out[4] = static_cast<double>(h.max_neighborhood());
                     },
                     cfg.jobs);
    rep.stats = mc.stats;
    rep.checks.push_back(all_ok("colorings-verified", rep.stat("verified")));
    if (cfg.audit) rep.checks.push_back(all_ok("list-audits", rep.stat("audits_ok")));
    rep.checks.push_back({"p1-grid", std::abs(hp.p1 - grid) <= 1e-4, hp.p1, grid, 0.0, "|p1 - grid| <= 1e-4"});
    rep.checks.push_back({"neighborhood-bound", rep.stat("max_neighborhood").max <= static_cast<double>(L),
                          rep.stat("max_neighborhood").max, static_cast<double>(L), 0.0, "max |N(f)| <= L"});
    finish(rep, cfg, trials, sw);
    return rep;
}

inline Report run_ramsey_experiment(const ExperimentConfig& cfg) {
    using namespace exp_detail;
    Stopwatch sw;
    Report rep;
    rep.experiment = "ramsey";
    const std::uint64_t trials = cfg.trials ? cfg.trials : 100;
    const std::size_t k = get(cfg.k, std::size_t{5});
    RamseyOptions opt;
    opt.n = get(cfg.n, std::size_t{0});
    if (cfg.cap) opt.cap = cfg.cap;
    const std::size_t n = opt.n ? opt.n : ramsey_n(static_cast<unsigned>(k));
    rep.instance = generated_instance("complete graph n=" + std::to_string(n));
    rep.parameters = {{"k", k}, {"n", n}};
    const auto rb = ramsey_runtime_bound(n, k);
    rep.bounds = {{"formula_n", ramsey_n(static_cast<unsigned>(k))}, {"symmetric_ok", rb.symmetric_ok}};
    auto mc = mc_run({"clique_free", "resamplings", "searcher_agrees"}, trials, cfg.seed,
                     [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
                         auto r = run_ramsey(k, rng, opt);
                         out[0] = check_clique_free(r.coloring, k).pass;
                         out[1] = static_cast<double>(r.resamplings);
                         // Uniform coloring: the branching searcher must list every clique the oracle finds.
                         EdgeColoring u(n);
                         for (std::size_t a = 0; a < n; ++a)
                             for (std::size_t b = a + 1; b < n; ++b)
                                 u.set(static_cast<int>(a), static_cast<int>(b), static_cast<int>(rng.below(2)));
                         out[2] = find_mono_cliques(u, k) == all_mono_cliques(u, k);
                     },
                     cfg.jobs);
    rep.stats = mc.stats;
    rep.checks.push_back(all_ok("clique-free", rep.stat("clique_free")));
    rep.checks.push_back(all_ok("searcher-equals-oracle", rep.stat("searcher_agrees")));
    rep.parameters["clique_free"] = rep.check("clique-free").pass;
    finish(rep, cfg, trials, sw);
    return rep;
}

inline Report run_ksat_experiment(const ExperimentConfig& cfg) {
    using namespace exp_detail;
    Stopwatch sw;
    Report rep;
    rep.experiment = "ksat-partial";
    const std::uint64_t trials = cfg.trials ? cfg.trials : 500;
    const double alpha = get(cfg.alpha, 2.0);
    CnfInstance inst;
    if (!cfg.instance.empty()) {
        inst = io::read_dimacs(cfg.instance, get(cfg.k, std::size_t{0}));
        rep.instance = file_instance(cfg.instance);
    } else {
        const std::size_t k = get(cfg.k, std::size_t{4}), m = get(cfg.m, std::size_t{500});
        const auto L = static_cast<std::size_t>(std::floor(ksat_max_L(k, alpha) + 1e-12));
        require(L >= 1, ErrorKind::InvalidArgument, "alpha too small for any occurrence bound");
        const std::size_t n = get(cfg.n, (m * k + L - 1) / L);
        const std::uint64_t iseed = instance_seed(cfg.seed, 0);
        inst = random_ksat(n, m, k, L, iseed);
        rep.instance = generated_instance("random_ksat n=" + std::to_string(n) + " m=" + std::to_string(m) + " k=" +
                                          std::to_string(k) + " L=" + std::to_string(L) + " seed=" + std::to_string(iseed));
    }
    auto s = ksat_setup(inst, alpha);
    rep.parameters = {{"n", inst.n}, {"m", inst.m()}, {"k", inst.k}, {"L", s.bias.L}, {"alpha", alpha},
                      {"z", s.bias.z}, {"x", s.bias.x}, {"best_of", cfg.best_of}, {"shortcut", s.shortcut}};
    rep.bounds = {{"mean_satisfied", s.bound}, {"mean_resamplings", static_cast<double>(inst.m()) * s.bias.z},
                  {"L_max", ksat_max_L(inst.k, alpha)}};
    MtOptions mo;
    mo.cap = cfg.cap;
    require(cfg.best_of >= 1, ErrorKind::InvalidArgument, "best-of must be at least 1");
    auto mc = mc_run({"satisfied", "falsified", "resamplings"}, trials, cfg.seed,
                     [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
                         KsatResult best;
                         for (std::size_t r = 0; r < cfg.best_of; ++r) {
                             auto res = run_partial_ksat(s, rng, mo);
                             if (r == 0) out[2] = static_cast<double>(res.resamplings);
                             if (r == 0 || res.satisfied > best.satisfied) best = std::move(res);
                         }
                         out[0] = static_cast<double>(best.satisfied);
                         out[1] = static_cast<double>(best.falsified);
                     },
                     cfg.jobs);
    rep.stats = mc.stats;
    rep.checks.push_back(lower("mean-satisfied", rep.stat("satisfied"), s.bound));
    if (!s.shortcut)
        rep.checks.push_back(upper("mean-resamplings", rep.stat("resamplings"), static_cast<double>(inst.m()) * s.bias.z));
    finish(rep, cfg, trials, sw);
    return rep;
}

inline Report run_parallel_experiment(const ExperimentConfig& cfg) {
    using namespace exp_detail;
    Stopwatch sw;
    Report rep;
    rep.experiment = "parallel-truncated";
    const std::uint64_t trials = cfg.trials ? cfg.trials : 100000;
    const double alpha = get(cfg.alpha, 2.0);
    const std::size_t width = get(cfg.width, std::size_t{2}), m = get(cfg.m, std::size_t{20});
    const auto in = symmetric_ring(m, width, alpha);
    const double d = 2.0 * static_cast<double>(width) - 1.0, p = in.family[0].prob;
    const auto pp = solve_parallel_params(p, d, alpha);
    rep.instance = generated_instance("symmetric_ring m=" + std::to_string(m) + " width=" + std::to_string(width));
    rep.parameters = {{"p", p}, {"d", d}, {"alpha", alpha}, {"t", pp.t}, {"beta", pp.beta},
                      {"r", pp.r}, {"lambda", pp.lambda}, {"z", pp.z}};
    const double bound = std::log(alpha) / d;
    rep.bounds = {{"survival", bound}, {"r_min", alpha / (std::numbers::e * d)}};
    std::vector<std::string> names;
    for (std::size_t i = 0; i < in.family.size(); ++i) names.push_back("survive" + std::to_string(i));
    names.push_back("resamplings");
    auto mc = mc_run(names, trials, cfg.seed,
                     [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
                         auto r = run_parallel_truncated(in.space, in.family, pp, rng);
                         std::fill(out.begin(), out.end(), 0.0);
                         for (auto b : r.survivors) out[b] = 1.0;
                         out.back() = static_cast<double>(r.resamplings);
                     },
                     cfg.jobs);
    rep.stats = mc.stats;
    double worst = 0.0;
    for (std::size_t i = 0; i < in.family.size(); ++i) worst = std::max(worst, mc.stats[i].mean);
    rep.checks.push_back(upper_freq("max-survival", worst, bound, trials));
    const double gap = std::abs(pp.gamma[pp.t] - pp.z);
    rep.checks.push_back({"gamma-self-check", pp.beta == 0.0 || gap <= std::ldexp(1.0, -40), gap, std::ldexp(1.0, -40), 0.0,
                          "|gamma_t(beta) - z|"});
    rep.checks.push_back({"r-lower", pp.r >= alpha / (std::numbers::e * d) * (1 - 1e-12), pp.r,
                          alpha / (std::numbers::e * d), 0.0, "r >= alpha/(e d)"});
    finish(rep, cfg, trials, sw);
    return rep;
}

/// The six-variable instance with at most 64 outcomes used for frequency checks.
inline Instance small_outcome_instance() {
    Instance in;
    in.name = "six-binary";
    in.space = ProductSpace::bernoulli({0.3, 0.5, 0.4, 0.6, 0.5, 0.3});
    const auto& sp = in.space;
    using S = std::span<const int>;
    in.family.add(make_event(sp, {0, 1}, [](S v) { return v[0] == 1 && v[1] == 1; }));
    in.family.add(make_event(sp, {1, 2, 3}, [](S v) { return v[0] == 0 && v[1] == 1 && v[2] == 1; }));
    in.family.add(make_event(sp, {3, 4}, [](S v) { return v[0] == 1 && v[1] == 0; }));
    in.family.add(make_event(sp, {0, 5}, [](S v) { return v[0] == 0 && v[1] == 1; }));
    DependencyGraph g(in.family, sp.size());
    std::vector<double> mu;
    require(solve_minimal_mu(in.family, g, mu), ErrorKind::CriterionViolated, "no fixed point");
    for (auto& x : mu) x *= 1 + 1e-12;
    in.family.set_mu(mu);
    return in;
}

inline Report run_entropy_experiment(const ExperimentConfig& cfg) {
    using namespace exp_detail;
    Stopwatch sw;
    Report rep;
    rep.experiment = "entropy-bound";
    const std::uint64_t trials = cfg.trials ? cfg.trials : 1000000;
    const double rho = get(cfg.rho, kRhoInfinity);
    rep.instance = generated_instance("random_instance x100 (<= 12 events); six-binary");
    std::size_t below_crude = 0, below_var = 0;
    const std::size_t instances = 100;
    for (std::uint64_t s = 0; s < instances; ++s) {
        auto in = random_instance(cfg.seed * 1000 + s, {.vars = 9, .events = 4 + s % 9, .need_criterion = false});
        CounterRng rng(cfg.seed, 0x656e7472ull + s);
        std::vector<double> mu(in.family.size());
        for (auto& x : mu) x = 1.5 * rng.uniform();
        auto db = distortion_bounds(in.family, mu, in.space.size());
        below_crude += db.has_exact && db.exact <= db.crude + 1e-12;
        below_var += db.has_exact && db.exact <= db.variable_based + 1e-12;
    }
    rep.checks.push_back({"exact-below-crude", below_crude == instances, static_cast<double>(below_crude),
                          static_cast<double>(instances), 0.0, "count of instances"});
    rep.checks.push_back({"exact-below-variable", below_var == instances, static_cast<double>(below_var),
                          static_cast<double>(instances), 0.0, "count of instances"});

    const auto in = small_outcome_instance();
    const auto mu = in.family.mu();
    auto eb = mt_entropy_bound(in.space, in.family, mu, rho);
    rep.parameters = {{"rho", std::isinf(rho) ? Json("inf") : Json(rho)}, {"base_entropy", eb.base_entropy},
                      {"distortion", eb.distortion}, {"distortion_source", eb.distortion_source}};
    rep.bounds = {{"entropy", eb.bound}, {"max_frequency", std::exp(-eb.bound)}};
    const std::size_t outcomes = std::size_t(1) << in.space.size();
    std::vector<std::string> names;
    for (std::size_t v = 0; v < outcomes; ++v) names.push_back("x" + std::to_string(v));
    auto mc = mc_run(names, trials, cfg.seed,
                     [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
                         auto r = run_mt(in.space, in.family, rng, {.record_log = false});
                         std::size_t code = 0;
                         for (std::size_t i = 0; i < in.space.size(); ++i) code |= static_cast<std::size_t>(r.config[i]) << i;
                         std::fill(out.begin(), out.end(), 0.0);
                         out[code] = 1.0;
                     },
                     cfg.jobs);
    double fmax = 0.0;
    for (const auto& s : mc.stats) fmax = std::max(fmax, s.mean);
    if (std::isinf(rho)) rep.checks.push_back(upper_freq("max-output-frequency", fmax, std::exp(-eb.bound), trials));
    rep.parameters["max_frequency_observed"] = fmax;
    finish(rep, cfg, trials, sw);
    return rep;
}

/// Symmetric check from --p/--d, or the full criterion on a built-in instance.
inline Report run_criterion_experiment(const ExperimentConfig& cfg) {
    using namespace exp_detail;
    Stopwatch sw;
    Report rep;
    rep.experiment = "criterion-check";
    CriterionReport cr;
    if (cfg.builtin.empty()) {
        const double p = get(cfg.p, 0.125), d = get(cfg.d, 2.0);
        cr = check_symmetric(p, d);
        rep.instance = generated_instance("symmetric p=" + std::to_string(p) + " d=" + std::to_string(d));
        rep.parameters = {{"p", p}, {"d", d}};
    } else {
        Instance in;
        if (cfg.builtin == "reference") in = reference_instance();
        else if (cfg.builtin == "six-binary") in = small_outcome_instance();
        else fail(ErrorKind::InvalidArgument, "unknown built-in instance " + cfg.builtin);
        DependencyGraph g(in.family, in.space.size());
        auto mu = in.family.mu();
        if (cfg.alpha) {
            for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = *cfg.alpha * std::numbers::e * in.family[i].prob;
        }
        cr = check_pegden(in.family, g, mu);
        rep.instance = generated_instance("builtin " + cfg.builtin);
        rep.parameters = {{"events", in.family.size()}, {"exact", cr.exact}, {"worst_event", cr.worst_event}};
    }
    rep.parameters["satisfied"] = cr.satisfied;
    rep.parameters["slack"] = cr.slack;
    rep.parameters["epsilon_slack"] = std::isinf(cr.epsilon_slack) ? Json("inf") : Json(cr.epsilon_slack);
    if (!std::isnan(cr.alpha)) rep.parameters["alpha"] = cr.alpha;
    finish(rep, cfg, 0, sw);
    if (!cr.satisfied) fail(ErrorKind::CriterionViolated, "criterion fails with slack " + std::to_string(cr.slack));
    return rep;
}

/// Witness trees, output distribution and internal states on the reference
/// instance, under either engine.
inline Report run_wtl_experiment(const ExperimentConfig& cfg, bool use_dfs = false) {
    using namespace exp_detail;
    Stopwatch sw;
    Report rep;
    rep.experiment = "wtl-verify";
    const std::uint64_t trials = cfg.trials ? cfg.trials : 100000;
    const double cutoff = get(cfg.cutoff, 1e-3);
    const auto in = reference_instance();
    DependencyGraph g(in.family, in.space.size());
    const auto mu = in.family.mu();
    rep.instance = generated_instance(in.name);
    std::vector<WitnessTree> trees;
    bool truncated = false;
    for (std::size_t b = 0; b < in.family.size(); ++b) {
        auto set = enumerate_structures(b, in.family, g, cutoff);
        truncated |= set.truncated;
        for (auto& t : set.trees) trees.push_back(std::move(t));
    }
    rep.parameters = {{"engine", use_dfs ? "dfs" : "naive"}, {"cutoff", cutoff}, {"structures", trees.size()},
                      {"enumeration_truncated", truncated}};
    MtOptions mo;
    mo.audit = use_dfs;
    auto wtl = verify_wtl(in.space, in.family, g, trees, trials, cfg.seed, mo, cfg.jobs, use_dfs);
    std::size_t worst = 0;
    double worst_gap = -1.0;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        const double gap = (wtl.frequency[i] - wtl.weight[i]) / std::max(wtl.sigma[i], 1e-300);
        if (gap > worst_gap) worst_gap = gap, worst = i;
    }
    if (!trees.empty())
        rep.checks.push_back({"witness-trees", wtl.violations == 0 && wtl.failed_runs == 0, wtl.frequency[worst],
                              wtl.weight[worst], wtl.sigma[worst],
                              std::to_string(wtl.violations) + " violations; worst " + wtl.canonical[worst]});

    const std::size_t P = in.probes.size(), Q = in.probe_pairs.size();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < P; ++i) names.push_back("probe:" + in.probes[i].name);
    for (std::size_t i = 0; i < Q; ++i)
        names.push_back("internal:" + in.probes[in.probe_pairs[i].first].name + "/B" + std::to_string(in.probe_pairs[i].second));
    names.push_back("audit_clean");
    auto mc = mc_run(names, trials, cfg.seed + 1,
                     [&](CounterRng& rng, std::uint64_t, std::span<double> out) {
                         MtResult r;
                         out[P + Q] = 1.0;
                         if (use_dfs) {
                             try {
                                 r = run_mt_dfs(in.space, in.family, g, rng, {.audit = true});
                             } catch (const Error& e) {
                                 if (e.kind() != ErrorKind::SearcherIncomplete) throw;
                                 out[P + Q] = 0.0;
                                 return;
                             }
                         } else {
                             r = run_mt(in.space, in.family, rng);
                         }
                         for (std::size_t i = 0; i < P; ++i) out[i] = in.probes[i].holds(r.config);
                         for (std::size_t i = 0; i < Q; ++i) {
                             auto [e, b] = in.probe_pairs[i];
                             out[P + i] = static_cast<double>(internal_count(in.family, r.log, in.probes[e], b));
                         }
                     },
                     cfg.jobs);
    rep.stats = mc.stats;
    bool dist_ok = true, internal_ok = true;
    Check dist_worst{"mt-distribution", true, 0, 0, 0, "worst probe"};
    double dist_gap = -1e300;
    for (std::size_t i = 0; i < P; ++i) {
        const double th = theta_of_scope(in.probes[i].prob, in.probes[i].scope, mu, g).value;
        rep.bounds["theta:" + in.probes[i].name] = th;
        const auto c = upper_freq(names[i], mc.stats[i].mean, th, trials);
        dist_ok &= c.pass;
        const double gap = (c.observed - c.bound) / std::max(c.sigma, 1e-300);
        if (gap > dist_gap) dist_gap = gap, dist_worst = c;
    }
    dist_worst.name = "mt-distribution";
    dist_worst.pass = dist_ok;
    rep.checks.push_back(dist_worst);
    Check int_worst{"internal-states", true, 0, 0, 0, ""};
    double int_gap = -1e300;
    for (std::size_t i = 0; i < Q; ++i) {
        auto [e, b] = in.probe_pairs[i];
        const double bound = mu[b] * theta_of_scope(in.probes[e].prob, in.probes[e].scope, mu, g).value;
        rep.bounds[names[P + i]] = bound;
        const auto c = upper(names[P + i], mc.stats[P + i], bound);
        internal_ok &= c.pass;
        const double gap = (c.observed - c.bound) / std::max(c.sigma, 1e-300);
        if (gap > int_gap) int_gap = gap, int_worst = c;
    }
    int_worst.name = "internal-states";
    int_worst.pass = internal_ok;
    rep.checks.push_back(int_worst);
    if (use_dfs) rep.checks.push_back(all_ok("audit-clean", mc.stats[P + Q], "full rescan after every DFS run"));
    finish(rep, cfg, trials, sw);
    return rep;
}

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"latin",   "partial-latin", "stein",     "nonrep",
                                                "kthue",   "rho-similar",   "hyp2col",   "ramsey",
                                                "ksat-partial", "parallel-truncated", "entropy-bound",
                                                "criterion-check", "wtl-verify"};
    return names;
}

inline Report run_experiment(const std::string& name, const ExperimentConfig& cfg) {
    if (name == "latin") return run_latin_experiment(cfg);
    if (name == "partial-latin") return run_partial_latin_experiment(cfg, false);
    if (name == "stein") return run_partial_latin_experiment(cfg, true);
    if (name == "nonrep" || name == "kthue" || name == "rho-similar") return run_path_experiment(cfg, name);
    if (name == "hyp2col") return run_hyp_experiment(cfg);
    if (name == "ramsey") return run_ramsey_experiment(cfg);
    if (name == "ksat-partial") return run_ksat_experiment(cfg);
    if (name == "parallel-truncated") return run_parallel_experiment(cfg);
    if (name == "entropy-bound") return run_entropy_experiment(cfg);
    if (name == "criterion-check") return run_criterion_experiment(cfg);
    if (name == "wtl-verify") return run_wtl_experiment(cfg);
    fail(ErrorKind::InvalidArgument, "unknown experiment " + name);
}

}  // namespace lll
